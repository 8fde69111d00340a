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

#include "nflos/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nflos
{

    void GridSpec::validate() const
    {
        if (!(omega_min < omega_max) || !(gamma_min < gamma_max))
            throw std::invalid_argument("GridSpec: bounds must satisfy min < max");
        if (l_omega < 1 || l_gamma < 1)
            throw std::invalid_argument("GridSpec: sample counts must be >= 1");
        if (refinement.levels < 0 || !(refinement.shrink > 0.0) || !(refinement.shrink < 1.0))
            throw std::invalid_argument("GridSpec: invalid refinement settings");
    }

    std::vector<double> axis_samples(double lo, double hi, int count)
    {
        std::vector<double> s(static_cast<size_t>(count) + 1);
        for (int i = 0; i <= count; ++i)
            s[static_cast<size_t>(i)] = (lo * (count - i) + i * hi) / count;
        return s;
    }

    namespace
    {
        AngularGrid grid_over(const GridSpec &used, double lbs_m)
        {
            const auto w = axis_samples(used.omega_min, used.omega_max, used.l_omega);
            const auto g = axis_samples(used.gamma_min, used.gamma_max, used.l_gamma);
            AngularGrid grid;
            grid.spec = used;
            grid.points.reserve(w.size() * w.size() * g.size());
            for (double w11 : w)
                for (double w1m : w)
                {
                    double d11;
                    try
                    {
                        d11 = ref_distance_from_aods(w11, w1m, lbs_m);
                    }
                    catch (const std::domain_error &)
                    {
                        continue;
                    }
                    if (!(d11 >= 0.0) || !std::isfinite(d11))
                        continue;
                    for (double gamma : g)
                        grid.points.push_back({w11, w1m, gamma});
                }
            if (grid.points.empty())
                throw std::runtime_error("build_grid: all grid points pruned as infeasible");
            return grid;
        }
    } // namespace

    AngularGrid build_grid(const GridSpec &spec, double lbs_m)
    {
        spec.validate();
        return grid_over(spec, lbs_m);
    }

    AngularGrid refine_grid(const AngleTriplet &center, const GridSpec &spec, int level, double lbs_m)
    {
        spec.validate();
        if (level < 0)
            throw std::invalid_argument("refine_grid: level must be >= 0");
        const double f = std::pow(spec.refinement.shrink, level);
        const double w_width = (spec.omega_max - spec.omega_min) * f;
        const double g_width = (spec.gamma_max - spec.gamma_min) * f;
        const auto window = [](double c, double width, double lo, double hi) {
            double a = c - width / 2.0;
            double b = c + width / 2.0;
            if (a < lo)
            {
                b += lo - a;
                a = lo;
            }
            if (b > hi)
            {
                a -= b - hi;
                b = hi;
            }
            return std::make_pair(std::max(a, lo), std::min(b, hi));
        };
        GridSpec used = spec;
        std::tie(used.omega_min, used.omega_max) = window(center.omega11, w_width, spec.omega_min, spec.omega_max);
        double o2_min, o2_max;
        std::tie(o2_min, o2_max) = window(center.omega1M, w_width, spec.omega_min, spec.omega_max);
        std::tie(used.gamma_min, used.gamma_max) = window(center.gamma, g_width, spec.gamma_min, spec.gamma_max);

        // The two omega axes need distinct windows once centered; sample them
        // separately and take the product with the gamma samples.
        const auto w1 = axis_samples(used.omega_min, used.omega_max, used.l_omega);
        const auto w2 = axis_samples(o2_min, o2_max, used.l_omega);
        const auto g = axis_samples(used.gamma_min, used.gamma_max, used.l_gamma);
        AngularGrid grid;
        grid.spec = used;
        grid.points.reserve(w1.size() * w2.size() * g.size());
        for (double w11 : w1)
            for (double w1m : w2)
            {
                double d11;
                try
                {
                    d11 = ref_distance_from_aods(w11, w1m, lbs_m);
                }
                catch (const std::domain_error &)
                {
                    continue;
                }
                if (!(d11 >= 0.0) || !std::isfinite(d11))
                    continue;
                for (double gamma : g)
                    grid.points.push_back({w11, w1m, gamma});
            }
        if (grid.points.empty())
            throw std::runtime_error("refine_grid: window contains no feasible triplet");
        return grid;
    }

} // namespace nflos
