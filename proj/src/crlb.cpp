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

#include "nflos/crlb.hpp"

#include <cmath>
#include <stdexcept>

namespace nflos
{

    DistancePartials distance_partials(const AngleTriplet &t, double lbs_m, double lb, double lu)
    {
        const double cos_w1m = std::cos(t.omega1M);
        if (std::abs(cos_w1m) < 1e-12)
            throw std::domain_error("distance_partials: omega1M at +-pi/2");
        const double tan_w1m = std::tan(t.omega1M);
        const double sec2_w1m = 1.0 / (cos_w1m * cos_w1m);
        const double sin_w = std::sin(t.omega11);
        const double cos_w = std::cos(t.omega11);
        const double den = tan_w1m * cos_w - sin_w;
        if (den == 0.0)
            throw std::domain_error("distance_partials: parallel rays");
        const double d11 = lbs_m / den;
        if (!(d11 > 0.0))
            throw std::domain_error("distance_partials: infeasible triplet");
        const double d = pair_distance(t, d11, lb, lu);
        const double a = d11 + lb * sin_w - lu * std::sin(t.omega11 + t.gamma);

        DistancePartials out;
        out.d_omega11 = d11 / d *
                        ((tan_w1m * sin_w + cos_w) / den * a +
                         lb * cos_w - lu * std::cos(t.omega11 + t.gamma));
        out.d_omega1M = d11 / d * (-sec2_w1m * cos_w / den * a);
        out.d_gamma = lu / d * (lb * std::sin(t.gamma) - d11 * std::cos(t.omega11 + t.gamma));
        return out;
    }

    MuPartials mu_partials(const AngleTriplet &t, std::complex<double> xi, const PilotConfig &cfg,
                           const LinearArray &bs, const LinearArray &ue, double wavelength)
    {
        const ModelResponse mr = model_response(t, cfg, bs, ue, wavelength);
        const Eigen::Index sz = mr.phase.size();
        MuPartials mp;
        for (auto &v : mp.d)
            v.resize(sz);

        const std::complex<double> j2pi_lambda(0.0, 2.0 * M_PI / wavelength);
        Eigen::Index idx = 0;
        for (int m : cfg.active_set)
        {
            const double lb = bs.spacings[static_cast<size_t>(m)];
            for (int n = 0; n < ue.size(); ++n, ++idx)
            {
                const double lu = ue.spacings[static_cast<size_t>(n)];
                const DistancePartials dp = distance_partials(t, bs.length(), lb, lu);
                const std::complex<double> dh = mr.inv_dist[idx] * mr.phase[idx]; // (D h)_i
                const std::complex<double> common = -(mr.inv_dist[idx] + j2pi_lambda) * dh * xi;
                mp.d[0][idx] = dp.d_omega11 * common;
                mp.d[1][idx] = dp.d_omega1M * common;
                mp.d[2][idx] = dp.d_gamma * common;
                mp.d[3][idx] = dh;
                mp.d[4][idx] = std::complex<double>(0.0, 1.0) * dh;
            }
        }
        return mp;
    }

    Eigen::Matrix<double, 5, 5> fisher_matrix_generic(const MuPartials &mp, double noise_var_eff)
    {
        Eigen::Matrix<double, 5, 5> f;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                f(i, j) = 2.0 / noise_var_eff * mp.d[static_cast<size_t>(i)].dot(mp.d[static_cast<size_t>(j)]).real();
        return f;
    }

    FisherMatrix fisher_matrix(const AngleTriplet &t, std::complex<double> xi, double noise_var_eff,
                               const PilotConfig &cfg, const LinearArray &bs, const LinearArray &ue,
                               double wavelength)
    {
        if (!(noise_var_eff > 0.0))
            throw std::invalid_argument("fisher_matrix: noise variance must be positive");
        const ModelResponse mr = model_response(t, cfg, bs, ue, wavelength);
        const double two_pi_lambda = 2.0 * M_PI / wavelength;

        Eigen::Matrix<double, 5, 5> f = Eigen::Matrix<double, 5, 5>::Zero();
        const double w = 2.0 / noise_var_eff;
        Eigen::Index idx = 0;
        for (int m : cfg.active_set)
        {
            const double lb = bs.spacings[static_cast<size_t>(m)];
            for (int n = 0; n < ue.size(); ++n, ++idx)
            {
                const double lu = ue.spacings[static_cast<size_t>(n)];
                const DistancePartials dp = distance_partials(t, bs.length(), lb, lu);
                const double inv = mr.inv_dist[idx];
                const double inv2 = inv * inv;
                const std::array<double, 3> dpart{dp.d_omega11, dp.d_omega1M, dp.d_gamma};
                // G_i = -dpart_i * (1/d + j 2 pi / lambda)
                for (int i = 0; i < 3; ++i)
                {
                    for (int j = i; j < 3; ++j)
                        f(i, j) += w * std::norm(xi) * inv2 *
                                   dpart[static_cast<size_t>(i)] * dpart[static_cast<size_t>(j)] *
                                   (inv2 + two_pi_lambda * two_pi_lambda);
                    const double g_re = -dpart[static_cast<size_t>(i)] * inv;
                    const double g_im = -dpart[static_cast<size_t>(i)] * two_pi_lambda;
                    // Re[xi G_i] and Im[xi G_i]; the Re-column sign follows the
                    // generic definition (see tests against fisher_matrix_generic).
                    f(i, 3) += w * inv2 * (xi.real() * g_re - xi.imag() * g_im);
                    f(i, 4) += w * inv2 * (xi.real() * g_im + xi.imag() * g_re);
                }
                f(3, 3) += w * inv2;
                f(4, 4) += w * inv2;
            }
        }
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < i; ++j)
                f(i, j) = f(j, i);
        f(3, 4) = f(4, 3) = 0.0;

        FisherMatrix out;
        out.info = f;
        const Eigen::JacobiSVD<Eigen::Matrix<double, 5, 5>> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto &sv = svd.singularValues();
        out.condition_number = sv(4) > 0.0 ? sv(0) / sv(4) : std::numeric_limits<double>::infinity();
        out.reliable = out.condition_number <= 1e12;
        if (!(sv(4) > 0.0))
            throw std::runtime_error("fisher_matrix: singular FIM, cond = inf");
        out.cov = f.inverse();
        return out;
    }

    std::array<double, 3> quantized_crlb(const FisherMatrix &fm, const QuantizerSpec &spec)
    {
        std::array<double, 3> b{};
        for (int i = 0; i < 3; ++i)
        {
            const double d = spec.step(i);
            b[static_cast<size_t>(i)] = fm.cov(i, i) + d * d / 12.0;
        }
        return b;
    }

    std::complex<double> clean_model_xi(double amplitude, double wavelength)
    {
        return {amplitude * wavelength / (4.0 * M_PI), 0.0};
    }

} // namespace nflos
