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

#ifndef NFLOS_TEST_HELPERS_HPP
#define NFLOS_TEST_HELPERS_HPP

#include "nflos/geometry.hpp"

#include <cmath>
#include <random>

namespace nflos::test
{
    // Independent 2D coordinate oracle: Euclidean distance and bearing from
    // explicit antenna positions, never through the closed forms.
    inline double oracle_distance(const Point2 &bs_antenna, const Point2 &ue_antenna)
    {
        return std::hypot(ue_antenna.x - bs_antenna.x, ue_antenna.y - bs_antenna.y);
    }

    // Bearing from +x, positive towards -y (the library convention).
    inline double oracle_bearing(const Point2 &bs_antenna, const Point2 &ue_antenna)
    {
        return std::atan2(-(ue_antenna.y - bs_antenna.y), ue_antenna.x - bs_antenna.x);
    }

    struct RandomPose
    {
        Placement place;
        LinearArray bs;
        LinearArray ue;
    };

    inline RandomPose random_pose(std::mt19937_64 &eng, bool random_arrays = true)
    {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        RandomPose rp;
        rp.place.d = 4.5 + 4.0 * unif(eng);
        rp.place.beta = (2.0 * unif(eng) - 1.0) * 80.0 * M_PI / 180.0;
        rp.place.gamma = unif(eng) * M_PI;
        if (random_arrays)
        {
            const int m = 2 + static_cast<int>(unif(eng) * 7);
            const int n = 1 + static_cast<int>(unif(eng) * 4);
            rp.bs.spacings.push_back(0.0);
            double acc = 0.0;
            for (int i = 1; i < m; ++i)
            {
                acc += 0.05 + 0.4 * unif(eng);
                rp.bs.spacings.push_back(acc);
            }
            rp.ue.spacings.push_back(0.0);
            acc = 0.0;
            for (int i = 1; i < n; ++i)
            {
                acc += 0.01 + 0.05 * unif(eng);
                rp.ue.spacings.push_back(acc);
            }
        }
        else
        {
            rp.bs = LinearArray::uniform_length(64, 2.0);
            rp.ue = LinearArray::uniform_spacing(4, 0.015);
        }
        return rp;
    }

} // namespace nflos::test

#endif
