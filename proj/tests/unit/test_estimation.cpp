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
#include "nflos/estimation.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <random>

using namespace nflos;

TEST_SUITE_BEGIN("estimation");

namespace
{
    constexpr double kLambda = 0.03;

    struct Setup
    {
        LinearArray bs = LinearArray::uniform_length(16, 2.0);
        LinearArray ue = LinearArray::uniform_spacing(4, 0.015);
        double amp = 1.1e-2;
        double noise = 3.16e-12;
    };

    GridSpec unit_grid(double omega_span_deg = 30.0, double omega_step_deg = 1.0,
                       double gamma_step_deg = 5.0)
    {
        GridSpec g;
        g.omega_min = -omega_span_deg * M_PI / 180.0;
        g.omega_max = omega_span_deg * M_PI / 180.0;
        g.gamma_min = 0.0;
        g.gamma_max = M_PI;
        g.l_omega = static_cast<int>(std::lround(2.0 * omega_span_deg / omega_step_deg));
        g.l_gamma = static_cast<int>(std::lround(180.0 / gamma_step_deg));
        return g;
    }

    // Snap a pose-derived triplet onto grid sample points, using the exact
    // axis sample formula so the value is bit-identical to the grid's.
    AngleTriplet snap_to_grid(const AngleTriplet &t, const GridSpec &g)
    {
        const auto snap = [](double v, double lo, double hi, int count) {
            const double step = (hi - lo) / count;
            const int idx = static_cast<int>(
                std::clamp(std::round((v - lo) / step), 0.0, static_cast<double>(count)));
            return (lo * (count - idx) + idx * hi) / count;
        };
        return {snap(t.omega11, g.omega_min, g.omega_max, g.l_omega),
                snap(t.omega1M, g.omega_min, g.omega_max, g.l_omega),
                snap(t.gamma, g.gamma_min, g.gamma_max, g.l_gamma)};
    }

    Eigen::MatrixXcd los_from_triplet(const AngleTriplet &t, const Setup &s)
    {
        return los_channel(pair_geometry(t, s.bs, s.ue), kLambda);
    }
} // namespace

TEST_CASE("pilot config construction")
{
    const PilotConfig cfg = make_pilot_config(64, 4, 1.0);
    CHECK(cfg.active_set.front() == 0);
    CHECK(cfg.active_set.back() == 63);
    CHECK(cfg.tau == 4);
    // near-uniform interior spacing
    CHECK(cfg.active_set[1] == 21);
    CHECK(cfg.active_set[2] == 42);
    const Eigen::MatrixXcd gram = cfg.pilots * cfg.pilots.adjoint();
    CHECK((gram - 4.0 * Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);

    SUBCASE("tau rule: max(4, count)")
    {
        CHECK(make_pilot_config(64, 2, 1.0).tau == 4);
        CHECK(make_pilot_config(64, 6, 1.0).tau == 6);
    }
    SUBCASE("invalid configs are rejected")
    {
        CHECK_THROWS_AS(make_pilot_config(64, 1, 1.0), std::invalid_argument);
        PilotConfig bad = make_pilot_config(64, 4, 1.0);
        bad.active_set[0] = 1;
        CHECK_THROWS_AS(bad.validate(64), std::invalid_argument);
    }
}

TEST_CASE("transmit_pilots correlation identities")
{
    const Setup s;
    const AngleTriplet t = placement_to_triplet({5.0, 0.2, 0.4}, s.bs, s.ue);
    const Eigen::MatrixXcd h = los_from_triplet(t, s);
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 4, s.amp);
    rng::Stream rng(1, 0, rng::Purpose::pilot_noise);

    SUBCASE("noiseless correlation recovers the scaled active columns")
    {
        const Measurement m = transmit_pilots(h, cfg, 0.0, rng);
        for (int i = 0; i < cfg.num_active(); ++i)
            CHECK((m.correlated.col(i) - s.amp * h.col(cfg.active_set[static_cast<size_t>(i)])).norm() <
                  1e-14);
        CHECK(m.stacked.size() == h.rows() * cfg.num_active());
        CHECK(m.noise_var_eff == 0.0);
    }
    SUBCASE("noise-only variance matches sigma^2 / tau")
    {
        const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(h.rows(), h.cols());
        const double sigma2 = 2.5;
        double acc = 0.0;
        int count = 0;
        for (int trial = 0; trial < 1500; ++trial)
        {
            const Measurement m = transmit_pilots(zero, cfg, sigma2, rng);
            acc += m.correlated.squaredNorm();
            count += static_cast<int>(m.correlated.size());
        }
        const double expected = sigma2 / cfg.tau;
        CHECK(acc / count == doctest::Approx(expected).epsilon(0.05));
        const Measurement m = transmit_pilots(zero, cfg, sigma2, rng);
        CHECK(m.noise_var_eff == doctest::Approx(expected));
    }
}

TEST_CASE("model_response structure")
{
    const Setup s;
    const LinearArray ue1{{0.0}};
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 2, s.amp);
    const AngleTriplet t = placement_to_triplet({5.0, 0.0, 0.0}, s.bs, ue1);
    const ModelResponse mr = model_response(t, cfg, s.bs, ue1, kLambda);
    REQUIRE(mr.inv_dist.size() == 2);
    const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, s.bs.length());
    CHECK(mr.inv_dist[0] == doctest::Approx(1.0 / d11));
    CHECK(mr.inv_dist[1] == doctest::Approx(1.0 / pair_distance(t, d11, s.bs.length(), 0.0)));
    for (Eigen::Index i = 0; i < mr.phase.size(); ++i)
        CHECK(std::abs(mr.phase[i]) == doctest::Approx(1.0));

    SUBCASE("infeasible triplet throws")
    {
        CHECK_THROWS_AS(model_response({0.4, 0.1, 0.0}, cfg, s.bs, ue1, kLambda), std::domain_error);
    }
}

TEST_CASE("fitted scalar reproduces the noiseless measurement")
{
    const Setup s;
    const AngleTriplet t = placement_to_triplet({6.0, -0.3, 1.1}, s.bs, s.ue);
    const Eigen::MatrixXcd h = los_from_triplet(t, s);
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 4, s.amp);
    rng::Stream rng(1, 0, rng::Purpose::pilot_noise);
    const Measurement m = transmit_pilots(h, cfg, 0.0, rng);
    const ModelResponse mr = model_response(t, cfg, s.bs, s.ue, kLambda);
    const std::complex<double> xi = fit_xi(m.stacked, mr);
    // the clean model is exactly xi = amp * lambda / (4 pi)
    CHECK(xi.real() == doctest::Approx(s.amp * kLambda / (4.0 * M_PI)).epsilon(1e-10));
    CHECK(std::abs(xi.imag()) < 1e-18);
    CHECK(model_residual(m.stacked, mr) < 1e-10 * m.stacked.squaredNorm());
}

TEST_CASE("fit_xi least-squares properties")
{
    const Setup s;
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 2, s.amp);
    const LinearArray ue1{{0.0}};
    const AngleTriplet t = placement_to_triplet({5.0, 0.1, 0.0}, s.bs, ue1);
    const ModelResponse mr = model_response(t, cfg, s.bs, ue1, kLambda);
    const Eigen::VectorXcd dh = mr.inv_dist.cwiseProduct(Eigen::VectorXd::Ones(2)).cast<std::complex<double>>()
                                    .cwiseProduct(mr.phase);

    SUBCASE("exact model recovery")
    {
        const std::complex<double> c{0.7, -1.3};
        CHECK(std::abs(fit_xi(c * dh, mr) - c) < 1e-12);
    }
    SUBCASE("orthogonal measurement gives zero")
    {
        Eigen::VectorXcd y(2);
        y[0] = std::conj(dh[1]);
        y[1] = -std::conj(dh[0]);
        CHECK(std::abs(fit_xi(y, mr)) < 1e-15);
    }
    SUBCASE("no random scalar beats the closed form")
    {
        std::mt19937_64 eng(9);
        std::normal_distribution<double> gauss;
        Eigen::VectorXcd y(2);
        y[0] = {gauss(eng), gauss(eng)};
        y[1] = {gauss(eng), gauss(eng)};
        const std::complex<double> xi = fit_xi(y, mr);
        const double best = (y - xi * dh).squaredNorm();
        const double scale = y.norm() / dh.norm();
        for (int i = 0; i < 10000; ++i)
        {
            const std::complex<double> cand{scale * gauss(eng), scale * gauss(eng)};
            CHECK((y - cand * dh).squaredNorm() >= best - 1e-12 * y.squaredNorm());
        }
    }
    SUBCASE("paper-literal form differs by exactly 1/N")
    {
        Eigen::VectorXcd y(2);
        y[0] = {0.3, 0.4};
        y[1] = {-0.1, 0.2};
        const auto ls = fit_xi(y, mr, XiForm::least_squares);
        const auto lit = fit_xi(y, mr, XiForm::paper_literal);
        CHECK(std::abs(ls - lit * static_cast<double>(mr.n_ue)) < 1e-15);
    }
}

TEST_CASE("ml_estimate on small grids")
{
    const Setup s;
    const GridSpec g = unit_grid();
    const AngularGrid grid = build_grid(g, s.bs.length());
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 4, s.amp);

    const AngleTriplet truth =
        snap_to_grid(placement_to_triplet({5.5, 0.15, 0.8}, s.bs, s.ue), g);
    const Eigen::MatrixXcd h = los_from_triplet(truth, s);
    rng::Stream rng(1, 0, rng::Purpose::pilot_noise);
    const Measurement m = transmit_pilots(h, cfg, 0.0, rng);

    SUBCASE("noiseless on-grid truth is recovered exactly")
    {
        const AngleTriplet est = ml_estimate(m, grid, cfg, s.bs, s.ue, kLambda);
        CHECK(est.omega11 == truth.omega11);
        CHECK(est.omega1M == truth.omega1M);
        CHECK(est.gamma == truth.gamma);
    }
    SUBCASE("argmin residual is minimal over the grid")
    {
        const AngleTriplet est = ml_estimate(m, grid, cfg, s.bs, s.ue, kLambda);
        const ModelResponse best = model_response(est, cfg, s.bs, s.ue, kLambda);
        const double best_res = model_residual(m.stacked, best);
        for (size_t i = 0; i < grid.size(); i += 7)
        {
            try
            {
                const ModelResponse mr = model_response(grid.points[i], cfg, s.bs, s.ue, kLambda);
                CHECK(model_residual(m.stacked, mr) >= best_res - 1e-15);
            }
            catch (const std::domain_error &)
            {
            }
        }
    }
    SUBCASE("cached search agrees with the streaming scan")
    {
        const MlGridSearch cached(grid, cfg, s.bs, s.ue, kLambda);
        const MlGridSearch streaming(grid, cfg, s.bs, s.ue, kLambda, 0);
        CHECK(cached.cached());
        CHECK_FALSE(streaming.cached());
        rng::Stream nrng(3, 1, rng::Purpose::pilot_noise);
        const Measurement noisy = transmit_pilots(h, cfg, 1e-13, nrng);
        const auto a = cached.best(noisy.stacked);
        const auto b = streaming.best(noisy.stacked);
        CHECK(a.index == b.index);
        CHECK(a.residual == doctest::Approx(b.residual).epsilon(1e-6));
        const AngleTriplet est = ml_estimate(noisy, grid, cfg, s.bs, s.ue, kLambda);
        CHECK(est.omega11 == grid.points[a.index].omega11);
    }
}

TEST_CASE("quantizer")
{
    QuantizerSpec spec;
    spec.bits = 2;
    spec.lo = {0.0, 0.0, 0.0};
    spec.hi = {180.0, 180.0, 180.0};

    SUBCASE("q = 2 over [0, 180]: levels at 0/60/120/180")
    {
        CHECK(spec.step(0) == doctest::Approx(60.0));
        const QuantizedTriplet q = quantize({100.0, 0.0, 180.0}, spec);
        CHECK(q.codes[0] == 2); // 100 -> 120
        CHECK(q.codes[1] == 0);
        CHECK(q.codes[2] == 3);
        const AngleTriplet back = dequantize(q, spec);
        CHECK(back.omega11 == doctest::Approx(120.0));
        CHECK(back.omega1M == doctest::Approx(0.0));
        CHECK(back.gamma == doctest::Approx(180.0));
    }
    SUBCASE("levels quantize to themselves")
    {
        for (int i = 0; i <= 3; ++i)
        {
            const double v = 60.0 * i;
            const QuantizedTriplet q = quantize({v, v, v}, spec);
            const AngleTriplet back = dequantize(q, spec);
            CHECK(back.omega11 == doctest::Approx(v));
        }
    }
    SUBCASE("clamping is silent but counted")
    {
        const QuantizedTriplet q = quantize({-5.0, 200.0, 90.0}, spec);
        CHECK(q.clamped == 2);
        CHECK(q.codes[0] == 0);
        CHECK(q.codes[1] == 3);
    }
    SUBCASE("roundtrip error bounded by half a step")
    {
        QuantizerSpec s9;
        s9.bits = 9;
        s9.lo = {-1.5, -1.5, 0.0};
        s9.hi = {1.5, 1.5, M_PI};
        std::mt19937_64 eng(17);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < 2000; ++i)
        {
            const AngleTriplet t{-1.5 + 3.0 * unif(eng), -1.5 + 3.0 * unif(eng), M_PI * unif(eng)};
            const AngleTriplet back = dequantize(quantize(t, s9), s9);
            CHECK(std::abs(back.omega11 - t.omega11) <= s9.step(0) / 2.0 + 1e-15);
            CHECK(std::abs(back.omega1M - t.omega1M) <= s9.step(1) / 2.0 + 1e-15);
            CHECK(std::abs(back.gamma - t.gamma) <= s9.step(2) / 2.0 + 1e-15);
        }
    }
    SUBCASE("error variance approaches step^2 / 12")
    {
        QuantizerSpec s6;
        s6.bits = 6;
        s6.lo = {0.0, 0.0, 0.0};
        s6.hi = {1.0, 1.0, 1.0};
        std::mt19937_64 eng(23);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double acc = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
        {
            const double v = unif(eng);
            const AngleTriplet back = dequantize(quantize({v, 0.0, 0.0}, s6), s6);
            acc += (back.omega11 - v) * (back.omega11 - v);
        }
        const double d = s6.step(0);
        CHECK(acc / n == doctest::Approx(d * d / 12.0).epsilon(0.03));
    }
    SUBCASE("ideal quantizer is the identity")
    {
        QuantizerSpec inf;
        inf.bits = 0;
        const AngleTriplet t{0.123456789, -0.5, 2.2};
        const AngleTriplet back = dequantize(quantize(t, inf), inf);
        CHECK(back.omega11 == t.omega11);
        CHECK(back.omega1M == t.omega1M);
        CHECK(back.gamma == t.gamma);
        CHECK(inf.step(0) == 0.0);
    }
}

TEST_CASE("reconstruct_los")
{
    const Setup s;
    const AngleTriplet truth = placement_to_triplet({5.0, -0.4, 0.9}, s.bs, s.ue);
    const Eigen::MatrixXcd h_true = los_from_triplet(truth, s);

    SUBCASE("exact triplet reproduces the channel bit for bit")
    {
        const Eigen::MatrixXcd h = reconstruct_los(truth, s.bs, s.ue, kLambda);
        CHECK((h - h_true).norm() == 0.0);
    }
    SUBCASE("error grows continuously with the perturbation")
    {
        double prev = 0.0;
        for (double delta : {1e-5, 2e-5, 4e-5, 8e-5})
        {
            const AngleTriplet p{truth.omega11 + delta, truth.omega1M, truth.gamma};
            const double err = (reconstruct_los(p, s.bs, s.ue, kLambda) - h_true).norm() / h_true.norm();
            CHECK(err > prev);
            prev = err;
        }
        CHECK(prev < 1.0); // far from full decorrelation
    }
    SUBCASE("infeasible feedback raises a diagnostic error")
    {
        CHECK_THROWS_WITH_AS(reconstruct_los({0.4, 0.1, 0.0}, s.bs, s.ue, kLambda),
                             doctest::Contains("infeasible"), std::domain_error);
    }
}

TEST_CASE("zoom estimator refines towards an off-grid truth")
{
    const Setup s;
    SearchPolicy policy;
    policy.omega_min = -30.0 * M_PI / 180.0;
    policy.omega_max = 30.0 * M_PI / 180.0;
    policy.pair_step = 0.1 * M_PI / 180.0;
    policy.gamma_step = 0.5 * M_PI / 180.0;
    policy.top_candidates = 6;
    policy.target_step = 1e-4 * M_PI / 180.0;
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 4, s.amp);
    const TripletEstimator est(policy, cfg, s.bs, s.ue, kLambda);

    const AngleTriplet truth = placement_to_triplet({5.3, 0.11, 0.77}, s.bs, s.ue);
    const Eigen::MatrixXcd h = los_from_triplet(truth, s);
    rng::Stream rng(1, 0, rng::Purpose::pilot_noise);
    const Measurement m = transmit_pilots(h, cfg, 0.0, rng);
    const AngleTriplet hat = est.estimate(m);
    CHECK(std::abs(hat.omega11 - truth.omega11) < 5e-4 * M_PI / 180.0);
    CHECK(std::abs(hat.omega1M - truth.omega1M) < 5e-4 * M_PI / 180.0);
    CHECK(std::abs(hat.gamma - truth.gamma) < 5e-3 * M_PI / 180.0);
    CHECK(est.last_residual() < 1e-4 * m.stacked.squaredNorm());

    SUBCASE("windowed mode needs and uses the hint")
    {
        SearchPolicy wp = policy;
        wp.window = 3.0 * M_PI / 180.0;
        const TripletEstimator west(wp, cfg, s.bs, s.ue, kLambda);
        CHECK_THROWS_AS(west.estimate(m, nullptr), std::invalid_argument);
        const AngleTriplet what = west.estimate(m, &truth);
        CHECK(std::abs(what.omega11 - truth.omega11) < 5e-4 * M_PI / 180.0);
    }
}

TEST_CASE("pipeline: noiseless on-grid truth with ideal quantizer is exact")
{
    const Setup s;
    const GridSpec g = unit_grid();
    const AngularGrid grid = build_grid(g, s.bs.length());
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 4, s.amp);
    const AngleTriplet truth =
        snap_to_grid(placement_to_triplet({6.2, -0.2, 1.3}, s.bs, s.ue), g);
    const Eigen::MatrixXcd h_true = los_from_triplet(truth, s);
    rng::Stream rng(1, 0, rng::Purpose::pilot_noise);
    const Measurement m = transmit_pilots(h_true, cfg, 0.0, rng);
    const AngleTriplet est = ml_estimate(m, grid, cfg, s.bs, s.ue, kLambda);
    QuantizerSpec ideal;
    ideal.bits = 0;
    const AngleTriplet fed_back = dequantize(quantize(est, ideal), ideal);
    const Eigen::MatrixXcd h_hat = reconstruct_los(fed_back, s.bs, s.ue, kLambda);
    CHECK((h_hat - h_true).norm() == 0.0);
}

TEST_CASE("fed-back parameter error is monotone in the quantizer resolution")
{
    const Setup s;
    SearchPolicy policy;
    policy.omega_min = -30.0 * M_PI / 180.0;
    policy.omega_max = 30.0 * M_PI / 180.0;
    policy.window = 3.0 * M_PI / 180.0;
    policy.target_step = 1e-3 * M_PI / 180.0;
    const PilotConfig cfg = make_pilot_config(s.bs.size(), 4, s.amp);
    const TripletEstimator est(policy, cfg, s.bs, s.ue, kLambda);

    const std::vector<int> bits{4, 6, 8, 10, 0};
    std::vector<double> mean_sse(bits.size(), 0.0);
    std::mt19937_64 eng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int seeds = 30;
    for (int seed = 0; seed < seeds; ++seed)
    {
        const Placement p{5.0 + 2.0 * unif(eng), -0.3 + 0.6 * unif(eng), 0.3 + 1.0 * unif(eng)};
        const AngleTriplet truth = placement_to_triplet(p, s.bs, s.ue);
        const Eigen::MatrixXcd h_true = los_from_triplet(truth, s);
        rng::Stream rng(11, static_cast<std::uint64_t>(seed), rng::Purpose::pilot_noise);
        const Measurement m = transmit_pilots(h_true, cfg, 0.0, rng);
        const AngleTriplet hat = est.estimate(m, &truth);
        for (size_t i = 0; i < bits.size(); ++i)
        {
            QuantizerSpec spec;
            spec.bits = bits[i];
            spec.lo = {policy.omega_min, policy.omega_min, policy.gamma_min};
            spec.hi = {policy.omega_max, policy.omega_max, policy.gamma_max};
            const AngleTriplet fb = dequantize(quantize(hat, spec), spec);
            const double sse = (fb.omega11 - truth.omega11) * (fb.omega11 - truth.omega11) +
                               (fb.omega1M - truth.omega1M) * (fb.omega1M - truth.omega1M) +
                               (fb.gamma - truth.gamma) * (fb.gamma - truth.gamma);
            mean_sse[i] += sse / seeds;
        }
    }
    for (size_t i = 1; i < bits.size(); ++i)
        CHECK(mean_sse[i] <= mean_sse[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("four pilots beat two pilots in noisy trials")
{
    const Setup s;
    SearchPolicy policy;
    policy.omega_min = -30.0 * M_PI / 180.0;
    policy.omega_max = 30.0 * M_PI / 180.0;
    policy.window = 4.0 * M_PI / 180.0;
    policy.target_step = 2e-4 * M_PI / 180.0;
    const PilotConfig cfg2 = make_pilot_config(s.bs.size(), 2, s.amp);
    const PilotConfig cfg4 = make_pilot_config(s.bs.size(), 4, s.amp);
    const TripletEstimator est2(policy, cfg2, s.bs, s.ue, kLambda);
    const TripletEstimator est4(policy, cfg4, s.bs, s.ue, kLambda);

    std::mt19937_64 eng(47);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int wins = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial)
    {
        const Placement p{4.8 + 3.0 * unif(eng), -0.5 + 1.0 * unif(eng), 0.2 + 2.2 * unif(eng)};
        const AngleTriplet truth = placement_to_triplet(p, s.bs, s.ue);
        const Eigen::MatrixXcd h_true = los_from_triplet(truth, s);
        rng::Stream r2(100, static_cast<std::uint64_t>(trial), rng::Purpose::pilot_noise, 2);
        rng::Stream r4(100, static_cast<std::uint64_t>(trial), rng::Purpose::pilot_noise, 4);
        const Measurement m2 = transmit_pilots(h_true, cfg2, s.noise, r2);
        const Measurement m4 = transmit_pilots(h_true, cfg4, s.noise, r4);
        const AngleTriplet e2 = est2.estimate(m2, &truth);
        const AngleTriplet e4 = est4.estimate(m4, &truth);
        const auto err = [&](const AngleTriplet &e) {
            return std::abs(e.omega11 - truth.omega11) + std::abs(e.omega1M - truth.omega1M) +
                   std::abs(e.gamma - truth.gamma);
        };
        if (err(e4) <= err(e2))
            ++wins;
    }
    CHECK(wins >= trials * 9 / 10);
}

TEST_SUITE_END();
