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

#include "nflos/ota.hpp"

#include <cmath>
#include <stdexcept>

namespace nflos
{

    void OtaConfig::validate(int total_streams) const
    {
        if (pilot_len < total_streams)
            throw std::invalid_argument("OtaConfig: pilot length below the total stream count");
        if (!(ue_power_w > 0.0))
            throw std::invalid_argument("OtaConfig: UE power must be positive");
        if (iterations < 0)
            throw std::invalid_argument("OtaConfig: negative iteration count");
        if (!(loading > 0.0))
            throw std::invalid_argument("OtaConfig: loading must be positive");
    }

    Eigen::MatrixXcd make_stream_pilots(int total_streams, int pilot_len)
    {
        if (pilot_len < total_streams)
            throw std::invalid_argument("make_stream_pilots: need pilot_len >= total streams");
        Eigen::MatrixXcd p(total_streams, pilot_len);
        for (int i = 0; i < total_streams; ++i)
            for (int t = 0; t < pilot_len; ++t)
                p(i, t) = std::polar(1.0, -2.0 * M_PI * i * t / pilot_len);
        return p;
    }

    Eigen::MatrixXcd forward_tx(const Eigen::MatrixXcd &true_channel, const PrecoderSet &pre,
                                const Eigen::MatrixXcd &pilots, double noise_var, rng::Stream &rng)
    {
        const Eigen::Index tau = pilots.cols();
        Eigen::MatrixXcd tx = Eigen::MatrixXcd::Zero(true_channel.cols(), tau);
        int row = 0;
        for (const auto &ue : pre.m)
            for (const auto &v : ue)
                tx.noalias() += v * pilots.row(row++).conjugate(); // m * p^H
        Eigen::MatrixXcd y = true_channel * tx;
        if (noise_var > 0.0)
            for (Eigen::Index t = 0; t < y.cols(); ++t)
                for (Eigen::Index n = 0; n < y.rows(); ++n)
                    y(n, t) += rng.cnormal(noise_var);
        return y;
    }

    Eigen::VectorXcd ue_combiner_from_forward(const Eigen::MatrixXcd &y_fwd,
                                              const Eigen::VectorXcd &pilot, double loading)
    {
        if (!(loading > 0.0))
            throw std::invalid_argument("ue_combiner_from_forward: loading must be positive");
        Eigen::MatrixXcd gram = y_fwd * y_fwd.adjoint();
        gram.diagonal().array() += loading;
        return Eigen::LLT<Eigen::MatrixXcd>(gram).solve(y_fwd * pilot);
    }

    Eigen::MatrixXcd backward_tx(const CombinerSet &comb, const std::vector<Eigen::MatrixXcd> &true_channels,
                                 const Eigen::MatrixXcd &pilots, const std::vector<std::vector<int>> &pilot_rows,
                                 double psi, double noise_var, rng::Stream &rng)
    {
        const Eigen::Index m_dim = true_channels.front().cols();
        Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(m_dim, pilots.cols());
        for (size_t k = 0; k < true_channels.size(); ++k)
            for (size_t s = 0; s < comb.u[k].size(); ++s)
            {
                const int row = pilot_rows[k][s];
                y.noalias() += psi * (true_channels[k].adjoint() * comb.u[k][s]) *
                               pilots.row(row).conjugate(); // u-precoded p^H
            }
        if (noise_var > 0.0)
            for (Eigen::Index t = 0; t < y.cols(); ++t)
                for (Eigen::Index n = 0; n < y.rows(); ++n)
                    y(n, t) += rng.cnormal(noise_var);
        return y;
    }

    PerStream<Eigen::VectorXcd> estimate_effective_channels(const Eigen::MatrixXcd &y_bwd,
                                                            const Eigen::MatrixXcd &pilots,
                                                            const std::vector<std::vector<int>> &pilot_rows,
                                                            double psi)
    {
        const double tau = static_cast<double>(pilots.cols());
        PerStream<Eigen::VectorXcd> h_eff(pilot_rows.size());
        for (size_t k = 0; k < pilot_rows.size(); ++k)
        {
            h_eff[k].resize(pilot_rows[k].size());
            for (size_t s = 0; s < pilot_rows[k].size(); ++s)
                h_eff[k][s] = y_bwd * pilots.row(pilot_rows[k][s]).transpose() / (psi * tau);
        }
        return h_eff;
    }

    AirInterface::AirInterface(std::vector<Eigen::MatrixXcd> true_channels, std::vector<double> noise_ue_w,
                               double noise_bs_w, std::uint64_t seed, std::uint64_t trial)
        : channels_(std::move(true_channels)), noise_ue_(std::move(noise_ue_w)), noise_bs_(noise_bs_w),
          fwd_rng_(seed, trial, rng::Purpose::ota_forward), bwd_rng_(seed, trial, rng::Purpose::ota_backward)
    {
        if (channels_.empty() || noise_ue_.size() != channels_.size())
            throw std::invalid_argument("AirInterface: inconsistent channel/noise lists");
    }

    std::vector<Eigen::MatrixXcd> AirInterface::forward(const PrecoderSet &pre, const Eigen::MatrixXcd &pilots)
    {
        std::vector<Eigen::MatrixXcd> y(channels_.size());
        for (size_t k = 0; k < channels_.size(); ++k)
            y[k] = forward_tx(channels_[k], pre, pilots, noise_ue_[k], fwd_rng_);
        return y;
    }

    Eigen::MatrixXcd AirInterface::backward(const CombinerSet &comb, const Eigen::MatrixXcd &pilots,
                                            const std::vector<std::vector<int>> &pilot_rows, double psi)
    {
        return backward_tx(comb, channels_, pilots, pilot_rows, psi, noise_bs_, bwd_rng_);
    }

    RateReport AirInterface::evaluate(const PrecoderSet &pre, const CombinerSet &comb) const
    {
        return sinr_rate(channels_, pre, comb, noise_ue_);
    }

    namespace
    {
        // BS-side MSE estimate: u^H H m == h_eff^H m entrywise and the UE
        // combiners are unit norm, so sigma^2 ||u||^2 == sigma^2.
        double ota_mse(const PerStream<Eigen::VectorXcd> &h_eff, const PrecoderSet &pre,
                       size_t k, size_t s, double noise_var)
        {
            double acc = noise_var;
            for (size_t j = 0; j < pre.m.size(); ++j)
                for (size_t l = 0; l < pre.m[j].size(); ++l)
                {
                    const std::complex<double> g = h_eff[k][s].dot(pre.m[j][l]);
                    if (j == k && l == s)
                        acc += std::norm(1.0 - g);
                    else
                        acc += std::norm(g);
                }
            return acc;
        }
    } // namespace

    CombinerSet ota_single_shot_combiners(AirInterface &air, const PrecoderSet &pre,
                                          int pilot_len, double loading_rel)
    {
        std::vector<std::vector<int>> pilot_rows(pre.m.size());
        int total = 0;
        for (size_t k = 0; k < pre.m.size(); ++k)
            for (size_t s = 0; s < pre.m[k].size(); ++s)
                pilot_rows[k].push_back(total++);
        const Eigen::MatrixXcd pilots = make_stream_pilots(total, std::max(pilot_len, total));
        const auto y_fwd = air.forward(pre, pilots);
        CombinerSet comb;
        comb.u.resize(pre.m.size());
        for (size_t k = 0; k < pre.m.size(); ++k)
        {
            const Eigen::MatrixXcd &y = y_fwd[k];
            const double gram_scale = y.squaredNorm() / static_cast<double>(y.rows());
            const double eps = std::max(air.noise_ue()[k], loading_rel * gram_scale);
            comb.u[k].resize(pre.m[k].size());
            for (size_t s = 0; s < pre.m[k].size(); ++s)
            {
                Eigen::VectorXcd u = ue_combiner_from_forward(y, pilots.row(pilot_rows[k][s]).transpose(), eps);
                const double norm = u.norm();
                if (norm > 0.0)
                    u /= norm;
                comb.u[k][s] = std::move(u);
            }
        }
        return comb;
    }

    OtaResult ota_refine(const PrecoderSet &init, AirInterface &air, const OtaConfig &cfg,
                         DualState duals, const ScaOptions &opts)
    {
        OtaResult out;
        out.precoders = init;
        const double p_bs = init.total_power();
        if (!(p_bs > 0.0))
            throw std::invalid_argument("ota_refine: initial precoders carry no power");

        std::vector<std::vector<int>> pilot_rows(out.precoders.m.size());
        int total_streams = 0;
        for (size_t k = 0; k < out.precoders.m.size(); ++k)
            for (size_t s = 0; s < out.precoders.m[k].size(); ++s)
                pilot_rows[k].push_back(total_streams++);
        cfg.validate(total_streams);
        const Eigen::MatrixXcd pilots = make_stream_pilots(total_streams, cfg.pilot_len);

        // Dual state may come from stage 1 with a pre-pruning stream layout;
        // rebuild it when the shapes disagree.
        const size_t n_ues = out.precoders.m.size();
        if (duals.lambda.size() != n_ues)
            duals.lambda.assign(n_ues, 1.0 / static_cast<double>(n_ues));
        bool t_valid = duals.t.size() == n_ues;
        for (size_t k = 0; t_valid && k < n_ues; ++k)
            t_valid = duals.t[k].size() == out.precoders.m[k].size();
        if (!t_valid)
        {
            duals.t.assign(n_ues, {});
            for (size_t k = 0; k < n_ues; ++k)
                duals.t[k].assign(out.precoders.m[k].size(), 0.0);
        }
        duals.nu = duals.t;
        bool t_initialized = t_valid;

        const double psi = std::sqrt(cfg.ue_power_w / static_cast<double>(total_streams));

        for (int iter = 1; iter <= cfg.iterations; ++iter)
        {
            const auto y_fwd = air.forward(out.precoders, pilots);
            CombinerSet comb;
            comb.u.resize(n_ues);
            for (size_t k = 0; k < n_ues; ++k)
            {
                const Eigen::MatrixXcd &y = y_fwd[k];
                const double gram_scale = y.squaredNorm() / static_cast<double>(y.rows());
                const double eps = std::max(air.noise_ue()[k], cfg.loading * gram_scale);
                comb.u[k].resize(out.precoders.m[k].size());
                for (size_t s = 0; s < out.precoders.m[k].size(); ++s)
                {
                    Eigen::VectorXcd u = ue_combiner_from_forward(
                        y, pilots.row(pilot_rows[k][s]).transpose(), eps);
                    const double norm = u.norm();
                    if (norm > 0.0)
                        u /= norm;
                    comb.u[k][s] = std::move(u);
                }
            }

            const RateReport rep = air.evaluate(out.precoders, comb);
            out.trace.push_back({iter, rep.min_rate, rep.mean_rate, out.precoders.total_power()});
            out.combiners = comb;

            const Eigen::MatrixXcd y_bwd = air.backward(comb, pilots, pilot_rows, psi);
            const auto h_eff = estimate_effective_channels(y_bwd, pilots, pilot_rows, psi);

            if (!t_initialized)
            {
                for (size_t k = 0; k < n_ues; ++k)
                    for (size_t s = 0; s < out.precoders.m[k].size(); ++s)
                        duals.t[k][s] = -std::log2(std::clamp(
                            ota_mse(h_eff, out.precoders, k, s, air.noise_ue()[k]), 1e-15, 1.0));
                t_initialized = true;
            }

            PerStream<TaylorPoint> pts(n_ues);
            for (size_t k = 0; k < n_ues; ++k)
            {
                pts[k].resize(out.precoders.m[k].size());
                for (size_t s = 0; s < out.precoders.m[k].size(); ++s)
                {
                    pts[k][s] = mse_surrogate(std::clamp(duals.t[k][s], 0.0, 60.0));
                    duals.nu[k][s] = duals.lambda[k] / pts[k][s].alpha_bar;
                }
            }

            out.precoders = kkt_precoder_update(h_eff, duals.nu, p_bs, &duals.eta);

            double rc_acc = 0.0;
            std::vector<double> per_ue_t(n_ues, 0.0);
            for (size_t k = 0; k < n_ues; ++k)
            {
                for (size_t s = 0; s < out.precoders.m[k].size(); ++s)
                {
                    const double mse = ota_mse(h_eff, out.precoders, k, s, air.noise_ue()[k]);
                    duals.t[k][s] = (pts[k][s].beta_bar - mse) / pts[k][s].alpha_bar;
                    per_ue_t[k] += duals.t[k][s];
                }
                rc_acc += per_ue_t[k];
            }
            duals.r_c = rc_acc / static_cast<double>(n_ues);

            const double step = opts.subgradient_step / std::sqrt(static_cast<double>(iter));
            double sum = 0.0;
            for (size_t k = 0; k < n_ues; ++k)
            {
                duals.lambda[k] = std::max(duals.lambda[k] + step * (duals.r_c - per_ue_t[k]), 0.0);
                sum += duals.lambda[k];
            }
            if (sum <= 0.0)
                duals.lambda.assign(n_ues, 1.0 / static_cast<double>(n_ues));
            else
                for (double &v : duals.lambda)
                    v /= sum;
        }
        return out;
    }

} // namespace nflos
