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

#include <doctest.h>

#include "nflos/grid.hpp"

#include <cmath>
#include <set>

using namespace nflos;

TEST_SUITE_BEGIN("grid");

namespace
{
    GridSpec small_spec()
    {
        GridSpec g;
        g.omega_min = -M_PI / 2.0;
        g.omega_max = M_PI / 2.0;
        g.gamma_min = 0.0;
        g.gamma_max = M_PI;
        g.l_omega = 8;
        g.l_gamma = 4;
        g.refinement = {3, 0.1};
        return g;
    }
} // namespace

TEST_CASE("axis_samples endpoint formula")
{
    const auto s = axis_samples(-M_PI / 2.0, M_PI / 2.0, 2);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == doctest::Approx(-M_PI / 2.0));
    CHECK(s[1] == doctest::Approx(0.0));
    CHECK(s[2] == doctest::Approx(M_PI / 2.0));

    SUBCASE("uniform spacing to within an ulp")
    {
        const auto v = axis_samples(-1.4835, 1.4835, 341);
        const double step = (1.4835 + 1.4835) / 341;
        for (size_t i = 1; i < v.size(); ++i)
            CHECK(v[i] - v[i - 1] == doctest::Approx(step).epsilon(1e-13));
    }
}

TEST_CASE("build_grid prunes infeasible AoD pairs")
{
    const GridSpec g = small_spec();
    const AngularGrid grid = build_grid(g, 2.0);
    CHECK(grid.size() > 0);
    CHECK(grid.size() <= static_cast<size_t>((g.l_omega + 1) * (g.l_omega + 1) * (g.l_gamma + 1)));
    for (const auto &t : grid.points)
    {
        const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, 2.0);
        CHECK(d11 >= 0.0);
    }
    // the crossed pair (pi/4, 0) must have been pruned
    for (const auto &t : grid.points)
        CHECK_FALSE((t.omega11 == doctest::Approx(M_PI / 4.0) && t.omega1M == 0.0));
}

TEST_CASE("build_grid kept plus pruned covers the full product")
{
    const GridSpec g = small_spec();
    const AngularGrid grid = build_grid(g, 2.0);
    const auto w = axis_samples(g.omega_min, g.omega_max, g.l_omega);
    const auto ga = axis_samples(g.gamma_min, g.gamma_max, g.l_gamma);
    size_t feasible = 0;
    for (double w11 : w)
        for (double w1m : w)
        {
            bool ok = true;
            try
            {
                ok = ref_distance_from_aods(w11, w1m, 2.0) >= 0.0;
            }
            catch (const std::domain_error &)
            {
                ok = false;
            }
            if (ok)
                feasible += ga.size();
        }
    CHECK(grid.size() == feasible);
}

TEST_CASE("build_grid determinism and duplicate freedom")
{
    const GridSpec g = small_spec();
    const AngularGrid a = build_grid(g, 2.0);
    const AngularGrid b = build_grid(g, 2.0);
    REQUIRE(a.size() == b.size());
    std::set<std::tuple<double, double, double>> seen;
    for (size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a.points[i].omega11 == b.points[i].omega11);
        CHECK(a.points[i].omega1M == b.points[i].omega1M);
        CHECK(a.points[i].gamma == b.points[i].gamma);
        seen.insert({a.points[i].omega11, a.points[i].omega1M, a.points[i].gamma});
    }
    CHECK(seen.size() == a.size());
}

TEST_CASE("refine_grid windows")
{
    const GridSpec g = small_spec();
    const AngleTriplet center{0.1, 0.4, 1.0};

    SUBCASE("level 0 reproduces build_grid")
    {
        const AngularGrid full = build_grid(g, 2.0);
        const AngularGrid refined = refine_grid(center, g, 0, 2.0);
        REQUIRE(full.size() == refined.size());
        for (size_t i = 0; i < full.size(); ++i)
        {
            CHECK(full.points[i].omega11 == refined.points[i].omega11);
            CHECK(full.points[i].omega1M == refined.points[i].omega1M);
            CHECK(full.points[i].gamma == refined.points[i].gamma);
        }
    }
    SUBCASE("levels shrink geometrically around the center")
    {
        for (int level = 1; level <= 3; ++level)
        {
            const AngularGrid refined = refine_grid(center, g, level, 2.0);
            const double w_width = (g.omega_max - g.omega_min) * std::pow(g.refinement.shrink, level);
            for (const auto &t : refined.points)
            {
                CHECK(std::abs(t.omega11 - center.omega11) <= w_width / 2.0 + 1e-12);
                CHECK(std::abs(t.omega1M - center.omega1M) <= w_width / 2.0 + 1e-12);
            }
            // three levels of shrink 0.1 from a 2 deg step reach 0.002 deg
            const double step = w_width / g.l_omega;
            const double expected = (g.omega_max - g.omega_min) / g.l_omega *
                                    std::pow(g.refinement.shrink, level);
            CHECK(step == doctest::Approx(expected));
        }
    }
    SUBCASE("window is clamped to the original bounds")
    {
        const AngleTriplet edge{g.omega_min, g.omega_max, 0.0};
        const AngularGrid refined = refine_grid(edge, g, 2, 2.0);
        for (const auto &t : refined.points)
        {
            CHECK(t.omega11 >= g.omega_min - 1e-12);
            CHECK(t.omega1M <= g.omega_max + 1e-12);
            CHECK(t.gamma >= g.gamma_min - 1e-12);
        }
    }
}

TEST_CASE("grid spec validation")
{
    GridSpec g = small_spec();
    g.l_omega = 0;
    CHECK_THROWS_AS(build_grid(g, 2.0), std::invalid_argument);
    g = small_spec();
    g.omega_min = g.omega_max;
    CHECK_THROWS_AS(build_grid(g, 2.0), std::invalid_argument);
}

TEST_SUITE_END();
