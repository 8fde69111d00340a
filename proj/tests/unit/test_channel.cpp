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

#include "nflos/channel.hpp"
#include "test_helpers.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

using namespace nflos;

namespace
{
    Scenario base_scenario(int num_ues, bool nlos)
    {
        Scenario sc;
        sc.wavelength = 0.03;
        sc.bs = LinearArray::uniform_length(64, 2.0);
        sc.p_bs_w = 3.16e-4;
        sc.rho_pilot_w = 5.0e-4;
        sc.noise_ue_w = 3.16e-12;
        sc.noise_bs_w = 3.16e-12;
        sc.nlos_enabled = nlos;
        const LinearArray ue = LinearArray::uniform_spacing(4, 0.015);
        for (int k = 0; k < num_ues; ++k)
        {
            const double beta = -0.6 + 0.15 * k;
            sc.ues.push_back({ue, {5.0 + 0.3 * k, beta, 0.3 + 0.2 * k}});
        }
        return sc;
    }
} // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("los_channel entry values")
{
    const double lambda = 0.03;
    PairGeometry pg;
    pg.d11 = lambda;
    pg.dist.resize(1, 2);
    pg.aod.resize(1, 2);
    pg.dist << lambda, lambda / 2.0;
    pg.aod << 0.0, 0.0;
    const Eigen::MatrixXcd h = los_channel(pg, lambda);
    // d = lambda: amplitude 1/(4 pi), phase -2 pi wraps to zero
    CHECK(h(0, 0).real() == doctest::Approx(1.0 / (4.0 * M_PI)));
    CHECK(h(0, 0).imag() == doctest::Approx(0.0).epsilon(1e-12));
    // d = lambda/2: phase -pi
    CHECK(h(0, 1).real() == doctest::Approx(-1.0 / (2.0 * M_PI)));
    CHECK(std::abs(h(0, 1).imag()) < 1e-12);
}

TEST_CASE("los_channel magnitude follows the 1/d law")
{
    const auto sc = base_scenario(1, false);
    const AngleTriplet t = placement_to_triplet(sc.ues[0].place, sc.bs, sc.ues[0].array);
    const PairGeometry pg = pair_geometry(t, sc.bs, sc.ues[0].array);
    const Eigen::MatrixXcd h = los_channel(pg, sc.wavelength);
    for (Eigen::Index m = 0; m < h.cols(); ++m)
        for (Eigen::Index n = 0; n < h.rows(); ++n)
            CHECK(std::abs(h(n, m)) ==
                  doctest::Approx(sc.wavelength / (4.0 * M_PI * pg.dist(n, m))).epsilon(1e-12));

    PairGeometry bad = pg;
    bad.dist(0, 0) = 0.0;
    CHECK_THROWS_AS(los_channel(bad, sc.wavelength), std::domain_error);
}

TEST_CASE("near-field LoS channel has usable rank at 5 m")
{
    auto sc = base_scenario(1, false);
    sc.ues[0].place = {5.0, 0.0, 0.0};
    const auto cs = generate_channels(sc);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cs.los[0]);
    CHECK(svd.singularValues()(1) > 1e-6 * svd.singularValues()(0));
}

TEST_CASE("nlos_channel image-source model")
{
    SUBCASE("zero reflection coefficient gives a zero matrix")
    {
        auto sc = base_scenario(1, true);
        sc.room.reflection_coeff = 0.0;
        CHECK(nlos_channel(sc, 0).norm() == 0.0);
    }
    SUBCASE("first-order paths match a hand image construction")
    {
        auto sc = base_scenario(1, true);
        sc.room.max_order = 1;
        sc.room.reflection_coeff = 0.5;
        sc.bs = LinearArray::uniform_length(2, 0.5);
        sc.ues.clear();
        sc.ues.push_back({LinearArray{{0.0}}, {5.0, 0.0, 0.0}});
        const Eigen::MatrixXcd h = nlos_channel(sc, 0);
        // BS antenna 1 at (0, 0, z0); UE point at (x_u, y_u, z0).
        const auto ue_pt = ue_positions(sc.ues[0].place, sc.bs, sc.ues[0].array).front();
        const double z0 = sc.mount_height;
        const double d_wall_pos = std::hypot(ue_pt.x, 17.0 - ue_pt.y);
        const double d_wall_neg = std::hypot(ue_pt.x, -17.0 - ue_pt.y);
        const double d_ceil = std::sqrt(ue_pt.x * ue_pt.x + ue_pt.y * ue_pt.y +
                                        (16.0 - 2.0 * z0) * (16.0 - 2.0 * z0));
        const auto entry = [&](double d) {
            return std::polar(0.5 * sc.wavelength / (4.0 * M_PI * d), -2.0 * M_PI * d / sc.wavelength);
        };
        const std::complex<double> expected = entry(d_wall_pos) + entry(d_wall_neg) + entry(d_ceil);
        CHECK(std::abs(h(0, 0) - expected) < 1e-15);
    }
    SUBCASE("second order adds four composite images")
    {
        auto sc = base_scenario(1, true);
        sc.room.reflection_coeff = 0.5;
        sc.room.max_order = 1;
        const Eigen::MatrixXcd first = nlos_channel(sc, 0);
        sc.room.max_order = 2;
        const Eigen::MatrixXcd both = nlos_channel(sc, 0);
        CHECK((both - first).norm() > 0.0);
        // second-order energy is weaker than first-order energy
        CHECK((both - first).norm() < first.norm());
    }
    SUBCASE("NLoS carries less energy than LoS for in-room poses")
    {
        auto sc = base_scenario(4, true);
        const auto cs = generate_channels(sc);
        for (int k = 0; k < 4; ++k)
            CHECK(cs.nlos[k].norm() < cs.los[k].norm());
    }
}

TEST_CASE("generate_channels contracts")
{
    SUBCASE("nlos disabled means composite equals los exactly")
    {
        const auto sc = base_scenario(2, false);
        const auto cs = generate_channels(sc);
        for (int k = 0; k < 2; ++k)
        {
            CHECK(cs.nlos[k].norm() == 0.0);
            CHECK((cs.composite[k] - cs.los[k]).norm() == 0.0);
        }
    }
    SUBCASE("deterministic for a fixed scenario")
    {
        const auto sc = base_scenario(3, true);
        const auto a = generate_channels(sc);
        const auto b = generate_channels(sc);
        for (int k = 0; k < 3; ++k)
            CHECK((a.composite[k] - b.composite[k]).norm() == 0.0);
    }
    SUBCASE("shapes follow the scenario")
    {
        auto sc = base_scenario(8, false);
        const auto cs = generate_channels(sc);
        CHECK(cs.los.size() == 8);
        for (const auto &h : cs.los)
        {
            CHECK(h.rows() == 4);
            CHECK(h.cols() == 64);
        }
    }
    SUBCASE("composite is always the exact sum")
    {
        const auto sc = base_scenario(2, true);
        const auto cs = generate_channels(sc);
        for (int k = 0; k < 2; ++k)
            CHECK((cs.composite[k] - (cs.los[k] + cs.nlos[k])).norm() == 0.0);
    }
    SUBCASE("out-of-room UE is rejected")
    {
        auto sc = base_scenario(1, false);
        sc.ues[0].place.d = 20.0;
        CHECK_THROWS_AS(generate_channels(sc), std::invalid_argument);
    }
}

TEST_CASE("channel CSV roundtrip")
{
    const auto sc = base_scenario(2, true);
    const auto cs = generate_channels(sc);
    std::stringstream ss;
    write_channel_csv(ss, cs);
    const ChannelSet back = read_channel_csv(ss);
    REQUIRE(back.los.size() == cs.los.size());
    for (size_t k = 0; k < cs.los.size(); ++k)
    {
        CHECK((back.los[k] - cs.los[k]).norm() <= 1e-12 * cs.los[k].norm());
        CHECK((back.nlos[k] - cs.nlos[k]).norm() <= 1e-12 * std::max(cs.nlos[k].norm(), 1e-30));
        CHECK((back.composite[k] - cs.composite[k]).norm() <= 1e-12 * cs.composite[k].norm());
    }
}

TEST_SUITE_END();
