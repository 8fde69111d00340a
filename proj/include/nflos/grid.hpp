// SPDX-License-Identifier: Apache-2.0
//
// nflos: geometry-aided near-field LoS MIMO CSI acquisition and precoding
// Copyright (C) 2026 the nflos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef NFLOS_GRID_HPP
#define NFLOS_GRID_HPP

#include "nflos/geometry.hpp"

#include <vector>

namespace nflos
{
    struct RefinementSpec
    {
        int levels = 0;
        double shrink = 0.2; // window width factor per level
    };

    // Sampling specification of the joint angular grid. Both AoD axes share
    // the omega bounds. An axis with count L yields L+1 samples including
    // both endpoints.
    struct GridSpec
    {
        double omega_min = 0.0;
        double omega_max = 0.0;
        double gamma_min = 0.0;
        double gamma_max = 0.0;
        int l_omega = 1;
        int l_gamma = 1;
        RefinementSpec refinement;

        void validate() const;
    };

    struct AngularGrid
    {
        std::vector<AngleTriplet> points; // feasible triplets, fixed order
        GridSpec spec;

        size_t size() const { return points.size(); }
    };

    // Uniform axis samples (min*(L-i) + i*max)/L for i = 0..L.
    std::vector<double> axis_samples(double lo, double hi, int count);

    // Cartesian product of the three axis sample sets, pruned of triplets
    // whose implied reference distance is negative or undefined. Throws if
    // nothing survives pruning.
    AngularGrid build_grid(const GridSpec &spec, double lbs_m);

    // Same sampling rule over a window of width bounds*shrink^level centered
    // on `center` (clamped to the original bounds, so level 0 reproduces
    // build_grid exactly).
    AngularGrid refine_grid(const AngleTriplet &center, const GridSpec &spec, int level, double lbs_m);

} // namespace nflos

#endif
