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

#include "nflos/geometry.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <random>

using namespace nflos;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("pair_distance reference cases")
{
    AngleTriplet t{0.0, 0.0, 0.0};
    CHECK(pair_distance(t, 5.0, 0.0, 0.0) == doctest::Approx(5.0));
    // BS antenna at (0,2), UE antenna at (5,0)
    CHECK(pair_distance(t, 5.0, 2.0, 0.0) == doctest::Approx(std::sqrt(29.0)));
    // parallel translation: both offsets equal, gamma = 0
    CHECK(pair_distance(t, 5.0, 2.0, 2.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(pair_distance(t, -1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("pair_aod reference cases")
{
    AngleTriplet t{0.0, 0.0, 0.0};
    CHECK(pair_aod(t, 5.0, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(pair_aod(t, 5.0, 5.0, 0.0) == doctest::Approx(M_PI / 4.0));

    AngleTriplet t2{0.2, 0.0, 0.3};
    const double d11 = 6.0;
    const Point2 bs{0.0, 1.0};
    const Point2 ue{d11 * std::cos(0.2) - 0.05 * std::sin(0.3),
                    -d11 * std::sin(0.2) + 0.05 * std::cos(0.3)};
    CHECK(pair_aod(t2, d11, 1.0, 0.05) ==
          doctest::Approx(test::oracle_bearing(bs, ue)).epsilon(1e-12));

    // exact zero denominator: d11 cos(0) == lu sin(pi/2)
    AngleTriplet head_on{0.0, 0.0, M_PI / 2.0};
    CHECK_THROWS_AS(pair_aod(head_on, 1.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("ref_distance_from_aods closed form and sign")
{
    CHECK(ref_distance_from_aods(0.0, M_PI / 4.0, 5.0) == doctest::Approx(5.0));
    // crossed rays give a negative distance, the grid pruning signal
    CHECK(ref_distance_from_aods(M_PI / 4.0, 0.0, 2.0) ==
          doctest::Approx(-2.0 * std::sqrt(2.0)));
    CHECK(ref_distance_from_aods(M_PI / 4.0, 0.0, 2.0) < 0.0);
    // exactly parallel rays
    CHECK_THROWS_AS(ref_distance_from_aods(0.0, 0.0, 2.0), std::domain_error);
}

TEST_CASE("ref_distance_from_aods inverts pair_aod at the outer antenna")
{
    std::mt19937_64 eng(7);
    for (int i = 0; i < 200; ++i)
    {
        const auto rp = test::random_pose(eng);
        const AngleTriplet t = placement_to_triplet(rp.place, rp.bs, rp.ue);
        const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, rp.bs.length());
        REQUIRE(d11 > 0.0);
        // omega1M is by definition the AoD of the (1, M) pair (lu = 0)
        CHECK(pair_aod(t, d11, rp.bs.length(), 0.0) == doctest::Approx(t.omega1M).epsilon(1e-12));
        // and the roundtrip through the recovered AoDs returns d11
        const double w11 = pair_aod(t, d11, 0.0, 0.0);
        const double w1m = pair_aod(t, d11, rp.bs.length(), 0.0);
        CHECK(ref_distance_from_aods(w11, w1m, rp.bs.length()) ==
              doctest::Approx(d11).epsilon(1e-10));
    }
}

TEST_CASE("closed forms match the coordinate oracle on random poses")
{
    std::mt19937_64 eng(42);
    for (int i = 0; i < 1000; ++i)
    {
        const auto rp = test::random_pose(eng);
        const auto bs_pts = bs_positions(rp.bs);
        const auto ue_pts = ue_positions(rp.place, rp.bs, rp.ue);
        const AngleTriplet t = placement_to_triplet(rp.place, rp.bs, rp.ue);
        const PairGeometry pg = pair_geometry(t, rp.bs, rp.ue);
        for (int m = 0; m < rp.bs.size(); ++m)
            for (int n = 0; n < rp.ue.size(); ++n)
            {
                const double d_ref = test::oracle_distance(bs_pts[static_cast<size_t>(m)],
                                                           ue_pts[static_cast<size_t>(n)]);
                const double w_ref = test::oracle_bearing(bs_pts[static_cast<size_t>(m)],
                                                          ue_pts[static_cast<size_t>(n)]);
                CHECK(std::abs(pg.dist(n, m) - d_ref) <= 1e-10 * d_ref);
                CHECK(pg.aod(n, m) == doctest::Approx(w_ref).epsilon(1e-10));
            }
    }
}

TEST_CASE("pair_geometry invariants")
{
    std::mt19937_64 eng(3);
    const auto rp = test::random_pose(eng, false);
    const AngleTriplet t = placement_to_triplet(rp.place, rp.bs, rp.ue);
    const PairGeometry pg = pair_geometry(t, rp.bs, rp.ue);
    CHECK(pg.dist(0, 0) == doctest::Approx(pg.d11));
    CHECK(pg.aod(0, 0) == doctest::Approx(t.omega11).epsilon(1e-12));
    CHECK(pg.aod(0, rp.bs.size() - 1) == doctest::Approx(t.omega1M).epsilon(1e-10));
    CHECK((pg.dist.array() > 0.0).all());

    SUBCASE("single-antenna arrays collapse to the reference pair")
    {
        const LinearArray one{{0.0}};
        const PairGeometry small = pair_geometry(t, pg.d11, one, one);
        CHECK(small.dist.rows() == 1);
        CHECK(small.dist.cols() == 1);
        CHECK(small.dist(0, 0) == doctest::Approx(pg.d11));
        CHECK(small.aod(0, 0) == doctest::Approx(t.omega11));
    }
    SUBCASE("infeasible triplet is rejected")
    {
        CHECK_THROWS_AS(pair_geometry({0.4, 0.1, 0.5}, rp.bs, rp.ue), std::domain_error);
    }
}

TEST_CASE("placement_to_triplet center distance roundtrip")
{
    std::mt19937_64 eng(11);
    for (int i = 0; i < 200; ++i)
    {
        const auto rp = test::random_pose(eng);
        const AngleTriplet t = placement_to_triplet(rp.place, rp.bs, rp.ue);
        const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, rp.bs.length());
        const auto pts = ue_coordinates(t, d11, rp.ue, {0.0, 0.0});
        const Point2 bs_center{0.0, rp.bs.length() / 2.0};
        const Point2 ue_center{(pts.front().x + pts.back().x) / 2.0,
                               (pts.front().y + pts.back().y) / 2.0};
        CHECK(test::oracle_distance(bs_center, ue_center) ==
              doctest::Approx(rp.place.d).epsilon(1e-10));
        CHECK(t.gamma == doctest::Approx(rp.place.gamma));
    }
}

TEST_CASE("placement_to_triplet symmetry and degenerate poses")
{
    const LinearArray bs = LinearArray::uniform_length(16, 2.0);
    SUBCASE("broadside pose with a point UE gives mirrored outer rays")
    {
        const LinearArray ue{{0.0}};
        const AngleTriplet t = placement_to_triplet({5.0, 0.0, 0.0}, bs, ue);
        CHECK(t.omega11 == doctest::Approx(-t.omega1M).epsilon(1e-12));
    }
    SUBCASE("multi-antenna UE: rays to the aperture midpoint are mirrored")
    {
        const LinearArray ue = LinearArray::uniform_spacing(4, 0.015);
        const auto pts = ue_positions({5.0, 0.0, 0.0}, bs, ue);
        const Point2 center{(pts.front().x + pts.back().x) / 2.0,
                            (pts.front().y + pts.back().y) / 2.0};
        const double w_low = test::oracle_bearing({0.0, 0.0}, center);
        const double w_high = test::oracle_bearing({0.0, bs.length()}, center);
        CHECK(w_low == doctest::Approx(-w_high).epsilon(1e-12));
    }
    SUBCASE("radially aligned UE (gamma = 90deg - beta) stays feasible")
    {
        const LinearArray ue = LinearArray::uniform_spacing(4, 0.015);
        const AngleTriplet t = placement_to_triplet(
            {5.0, M_PI / 3.0, M_PI / 2.0 - M_PI / 3.0}, bs, ue);
        CHECK(ref_distance_from_aods(t.omega11, t.omega1M, bs.length()) > 0.0);
    }
    SUBCASE("UE crossing the array plane is rejected")
    {
        const LinearArray ue = LinearArray::uniform_spacing(2, 0.5);
        CHECK_THROWS_AS(placement_to_triplet({0.05, 80.0 * M_PI / 180.0, M_PI / 2.0}, bs, ue),
                        std::domain_error);
    }
    SUBCASE("invalid pose parameters are rejected")
    {
        const LinearArray ue{{0.0}};
        CHECK_THROWS_AS(placement_to_triplet({-1.0, 0.0, 0.0}, bs, ue), std::invalid_argument);
        CHECK_THROWS_AS(placement_to_triplet({5.0, M_PI / 2.0, 0.0}, bs, ue), std::invalid_argument);
    }
}

TEST_CASE("ue_coordinates recursion")
{
    const LinearArray ue = LinearArray::uniform_spacing(3, 0.5);
    SUBCASE("first point sits on the bearing ray")
    {
        const auto pts = ue_coordinates({0.0, 0.3, 0.0}, 5.0, ue, {0.0, 0.0});
        CHECK(pts[0].x == doctest::Approx(5.0));
        CHECK(pts[0].y == doctest::Approx(0.0));
    }
    SUBCASE("gamma = 0 keeps a common x coordinate")
    {
        const auto pts = ue_coordinates({0.2, 0.5, 0.0}, 4.0, ue, {1.0, -2.0});
        CHECK(pts[0].x == doctest::Approx(pts[1].x));
        CHECK(pts[1].x == doctest::Approx(pts[2].x));
        CHECK(pts[1].y - pts[0].y == doctest::Approx(0.5));
    }
    SUBCASE("points match the placement coordinates")
    {
        std::mt19937_64 eng(5);
        for (int i = 0; i < 100; ++i)
        {
            const auto rp = test::random_pose(eng);
            const AngleTriplet t = placement_to_triplet(rp.place, rp.bs, rp.ue);
            const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, rp.bs.length());
            const auto rec = ue_coordinates(t, d11, rp.ue, {0.0, 0.0});
            const auto ref = ue_positions(rp.place, rp.bs, rp.ue);
            for (size_t n = 0; n < rec.size(); ++n)
            {
                CHECK(rec[n].x == doctest::Approx(ref[n].x).epsilon(1e-10));
                CHECK(rec[n].y == doctest::Approx(ref[n].y).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("LinearArray validation")
{
    const LinearArray bad_first{{0.1, 0.2}};
    const LinearArray bad_order{{0.0, 0.2, 0.2}};
    CHECK_THROWS_AS(bad_first.validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad_order.validate(), std::invalid_argument);
    CHECK_NOTHROW(LinearArray::uniform_length(64, 2.0).validate());
    CHECK(LinearArray::uniform_length(64, 2.0).spacings[1] == doctest::Approx(2.0 / 63.0));
}

TEST_SUITE_END();
