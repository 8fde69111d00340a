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

#include "nflos/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nflos
{
    namespace
    {
        double log2_1p(double x) { return std::log1p(x) / M_LN2; }
    }

    int StreamAllocation::total_streams() const
    {
        return std::accumulate(counts.begin(), counts.end(), 0);
    }

    StreamAllocation allocate_streams(const std::vector<Eigen::MatrixXcd> &channels, double alpha)
    {
        if (!(alpha >= 1.0))
            throw std::invalid_argument("allocate_streams: alpha must be >= 1");
        StreamAllocation alloc;
        alloc.alpha = alpha;
        for (const auto &h : channels)
        {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Eigen::VectorXd sv = svd.singularValues();
            const double top = sv.size() > 0 ? sv(0) : 0.0;
            int s_k = 0;
            if (top > 0.0)
            {
                for (Eigen::Index i = 0; i < sv.size(); ++i)
                    if (sv(i) >= top / alpha)
                        ++s_k;
            }
            bool degenerate = false;
            if (s_k == 0)
            {
                s_k = 1;
                degenerate = true;
            }
            s_k = std::min<int>(s_k, static_cast<int>(std::min(h.rows(), h.cols())));
            alloc.counts.push_back(s_k);
            alloc.sing_values.push_back(sv);
            alloc.degenerate.push_back(degenerate);
            Eigen::MatrixXcd dirs = svd.matrixV().leftCols(s_k);
            if (degenerate)
                dirs = Eigen::MatrixXcd::Identity(h.cols(), s_k); // arbitrary direction for a zero channel
            alloc.init_dirs.push_back(std::move(dirs));
        }
        return alloc;
    }

    double PrecoderSet::total_power() const
    {
        double p = 0.0;
        for (const auto &ue : m)
            for (const auto &v : ue)
                p += v.squaredNorm();
        return p;
    }

    PrecoderSet init_precoders(const StreamAllocation &alloc, double p_bs, bool literal_scaling)
    {
        if (!(p_bs > 0.0))
            throw std::invalid_argument("init_precoders: power budget must be positive");
        double total = 0.0;
        for (const auto &dirs : alloc.init_dirs)
            total += dirs.squaredNorm();
        if (!(total > 0.0))
            throw std::invalid_argument("init_precoders: no directions to scale");
        const double c1 = literal_scaling ? p_bs / total : std::sqrt(p_bs / total);
        PrecoderSet pre;
        pre.m.resize(alloc.counts.size());
        for (size_t k = 0; k < alloc.counts.size(); ++k)
        {
            pre.m[k].resize(static_cast<size_t>(alloc.counts[k]));
            for (int s = 0; s < alloc.counts[k]; ++s)
                pre.m[k][static_cast<size_t>(s)] = c1 * alloc.init_dirs[k].col(s);
        }
        return pre;
    }

    CombinerSet mmse_combiners(const std::vector<Eigen::MatrixXcd> &channels, const PrecoderSet &pre,
                               const std::vector<double> &noise_var)
    {
        CombinerSet comb;
        comb.u.resize(channels.size());
        for (size_t k = 0; k < channels.size(); ++k)
        {
            const auto &h = channels[k];
            const Eigen::Index n_rx = h.rows();
            Eigen::MatrixXcd cov = noise_var[k] * Eigen::MatrixXcd::Identity(n_rx, n_rx);
            for (const auto &ue : pre.m)
                for (const auto &v : ue)
                {
                    const Eigen::VectorXcd hv = h * v;
                    cov.noalias() += hv * hv.adjoint();
                }
            const Eigen::LLT<Eigen::MatrixXcd> llt(cov);
            comb.u[k].resize(pre.m[k].size());
            for (size_t s = 0; s < pre.m[k].size(); ++s)
                comb.u[k][s] = llt.solve(h * pre.m[k][s]);
        }
        return comb;
    }

    RateReport sinr_rate(const std::vector<Eigen::MatrixXcd> &channels, const PrecoderSet &pre,
                         const CombinerSet &comb, const std::vector<double> &noise_var)
    {
        RateReport rep;
        rep.sinr.resize(channels.size());
        rep.per_ue_rate.resize(channels.size());
        for (size_t k = 0; k < channels.size(); ++k)
        {
            const auto &h = channels[k];
            double rate = 0.0;
            rep.sinr[k].resize(comb.u[k].size());
            for (size_t s = 0; s < comb.u[k].size(); ++s)
            {
                const auto &u = comb.u[k][s];
                double interference = 0.0;
                double signal = 0.0;
                for (size_t j = 0; j < pre.m.size(); ++j)
                    for (size_t l = 0; l < pre.m[j].size(); ++l)
                    {
                        const double p = std::norm(u.dot(h * pre.m[j][l]));
                        if (j == k && l == s)
                            signal = p;
                        else
                            interference += p;
                    }
                const double gamma = signal / (interference + noise_var[k] * u.squaredNorm());
                rep.sinr[k][s] = gamma;
                rate += log2_1p(gamma);
            }
            rep.per_ue_rate[k] = rate;
        }
        rep.min_rate = *std::min_element(rep.per_ue_rate.begin(), rep.per_ue_rate.end());
        rep.mean_rate = std::accumulate(rep.per_ue_rate.begin(), rep.per_ue_rate.end(), 0.0) /
                        static_cast<double>(rep.per_ue_rate.size());
        return rep;
    }

    double stream_mse(const Eigen::MatrixXcd &channel_k, const Eigen::VectorXcd &u_ks,
                      const PrecoderSet &pre, int k, int s, double noise_var_k)
    {
        double mse = noise_var_k * u_ks.squaredNorm();
        for (size_t j = 0; j < pre.m.size(); ++j)
            for (size_t l = 0; l < pre.m[j].size(); ++l)
            {
                const std::complex<double> g = u_ks.dot(channel_k * pre.m[j][l]);
                if (j == static_cast<size_t>(k) && l == static_cast<size_t>(s))
                    mse += std::norm(1.0 - g);
                else
                    mse += std::norm(g);
            }
        return mse;
    }

    PerStream<double> all_stream_mse(const std::vector<Eigen::MatrixXcd> &channels,
                                     const PrecoderSet &pre, const CombinerSet &comb,
                                     const std::vector<double> &noise_var)
    {
        PerStream<double> mse(channels.size());
        for (size_t k = 0; k < channels.size(); ++k)
        {
            mse[k].resize(comb.u[k].size());
            for (size_t s = 0; s < comb.u[k].size(); ++s)
                mse[k][s] = stream_mse(channels[k], comb.u[k][s], pre,
                                       static_cast<int>(k), static_cast<int>(s), noise_var[k]);
        }
        return mse;
    }

    TaylorPoint taylor_points(double t_bar)
    {
        const double p = std::exp2(t_bar);
        return {p * M_LN2, p * (1.0 + t_bar * M_LN2)};
    }

    TaylorPoint mse_surrogate(double t_bar)
    {
        const double p = std::exp2(-t_bar);
        return {p * M_LN2, p * (1.0 + t_bar * M_LN2)};
    }

    PrecoderSet kkt_precoder_update(const PerStream<Eigen::VectorXcd> &h_eff,
                                    const PerStream<double> &nu, double p_bs,
                                    double *eta_out, double power_rel_tol)
    {
        if (!(p_bs > 0.0))
            throw std::invalid_argument("kkt_precoder_update: power budget must be positive");
        Eigen::Index m_dim = 0;
        for (const auto &ue : h_eff)
            for (const auto &h : ue)
                m_dim = std::max(m_dim, h.size());
        if (m_dim == 0)
            throw std::invalid_argument("kkt_precoder_update: no streams");

        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m_dim, m_dim);
        double scale = 0.0;
        for (size_t k = 0; k < h_eff.size(); ++k)
            for (size_t s = 0; s < h_eff[k].size(); ++s)
            {
                if (nu[k][s] < 0.0)
                    throw std::invalid_argument("kkt_precoder_update: negative dual");
                a.noalias() += nu[k][s] * (h_eff[k][s] * h_eff[k][s].adjoint());
                scale = std::max(scale, nu[k][s] * h_eff[k][s].squaredNorm());
            }
        if (!(scale > 0.0))
            throw std::runtime_error("kkt_precoder_update: all duals vanished, cannot bracket the budget");

        const auto solve_power = [&](double eta, PrecoderSet *out) {
            Eigen::MatrixXcd reg = a;
            reg.diagonal().array() += eta;
            const Eigen::LLT<Eigen::MatrixXcd> llt(reg);
            double power = 0.0;
            if (out)
                out->m.resize(h_eff.size());
            for (size_t k = 0; k < h_eff.size(); ++k)
            {
                if (out)
                    out->m[k].resize(h_eff[k].size());
                for (size_t s = 0; s < h_eff[k].size(); ++s)
                {
                    Eigen::VectorXcd v = llt.solve(nu[k][s] * h_eff[k][s]);
                    power += v.squaredNorm();
                    if (out)
                        out->m[k][s] = std::move(v);
                }
            }
            return power;
        };

        // eta ~ 0: accept when even the nearly unconstrained solution is
        // within budget.
        double eta_lo = 1e-12 * scale;
        if (solve_power(eta_lo, nullptr) <= p_bs)
        {
            PrecoderSet pre;
            solve_power(eta_lo, &pre);
            if (eta_out)
                *eta_out = eta_lo;
            return pre;
        }
        double eta_hi = std::max(scale / p_bs, eta_lo * 2.0);
        int guard = 0;
        while (solve_power(eta_hi, nullptr) > p_bs)
        {
            eta_hi *= 4.0;
            if (++guard > 200)
                throw std::runtime_error("kkt_precoder_update: bisection failed to bracket the power budget");
        }
        double power_mid = 0.0;
        for (int it = 0; it < 200; ++it)
        {
            const double eta_mid = 0.5 * (eta_lo + eta_hi);
            power_mid = solve_power(eta_mid, nullptr);
            if (power_mid > p_bs)
                eta_lo = eta_mid;
            else
                eta_hi = eta_mid;
            if (power_mid <= p_bs && power_mid >= p_bs * (1.0 - power_rel_tol))
            {
                PrecoderSet pre;
                solve_power(eta_mid, &pre);
                if (eta_out)
                    *eta_out = eta_mid;
                return pre;
            }
        }
        // Interval collapsed; take the feasible endpoint.
        PrecoderSet pre;
        solve_power(eta_hi, &pre);
        if (eta_out)
            *eta_out = eta_hi;
        if (pre.total_power() > p_bs * (1.0 + 1e-9))
            throw std::runtime_error("kkt_precoder_update: bisection failed to meet the power budget");
        return pre;
    }

    namespace
    {
        // Euclidean projection onto the probability simplex.
        void project_simplex(std::vector<double> &lambda)
        {
            std::vector<double> sorted = lambda;
            std::sort(sorted.begin(), sorted.end(), std::greater<double>());
            double cumsum = 0.0, theta = 0.0;
            int rho = 0;
            for (size_t j = 0; j < sorted.size(); ++j)
            {
                cumsum += sorted[j];
                const double candidate = (1.0 - cumsum) / static_cast<double>(j + 1);
                if (sorted[j] + candidate > 0.0)
                {
                    rho = static_cast<int>(j + 1);
                    theta = candidate;
                }
            }
            if (rho == 0)
            {
                std::fill(lambda.begin(), lambda.end(), 1.0 / static_cast<double>(lambda.size()));
                return;
            }
            for (double &v : lambda)
                v = std::max(v + theta, 0.0);
        }
    }

    ScaResult sca_maxmin_solve(const std::vector<Eigen::MatrixXcd> &channels,
                               const StreamAllocation &alloc, const std::vector<double> &noise_var,
                               double p_bs, const ScaOptions &opts)
    {
        const size_t n_ues = channels.size();
        if (n_ues == 0 || alloc.counts.size() != n_ues || noise_var.size() != n_ues)
            throw std::invalid_argument("sca_maxmin_solve: inconsistent inputs");

        ScaResult res;
        res.precoders = init_precoders(alloc, p_bs, opts.literal_scaling);
        res.combiners = mmse_combiners(channels, res.precoders, noise_var);

        DualState duals;
        duals.lambda.assign(n_ues, 1.0 / static_cast<double>(n_ues));
        duals.mu_step = opts.subgradient_step;
        duals.nu.resize(n_ues);
        duals.t.resize(n_ues);

        // Initial surrogate rates from the achieved MSEs.
        PerStream<double> mse = all_stream_mse(channels, res.precoders, res.combiners, noise_var);
        for (size_t k = 0; k < n_ues; ++k)
        {
            duals.t[k].resize(mse[k].size());
            duals.nu[k].resize(mse[k].size());
            for (size_t s = 0; s < mse[k].size(); ++s)
                duals.t[k][s] = -std::log2(std::clamp(mse[k][s], 1e-15, 1.0));
        }

        double prev_rc = -1.0;
        double best_min_rate = -1.0;
        PrecoderSet best_pre = res.precoders;
        CombinerSet best_comb = res.combiners;

        for (int iter = 1; iter <= opts.max_iters; ++iter)
        {
            res.iterations = iter;
            res.combiners = mmse_combiners(channels, res.precoders, noise_var);

            PerStream<Eigen::VectorXcd> h_eff(n_ues);
            PerStream<TaylorPoint> pts(n_ues);
            for (size_t k = 0; k < n_ues; ++k)
            {
                h_eff[k].resize(res.combiners.u[k].size());
                pts[k].resize(res.combiners.u[k].size());
                for (size_t s = 0; s < res.combiners.u[k].size(); ++s)
                {
                    h_eff[k][s] = channels[k].adjoint() * res.combiners.u[k][s];
                    // Clamping keeps nu finite when a stream transiently
                    // reports mse > 1 (negative surrogate rate).
                    pts[k][s] = mse_surrogate(std::clamp(duals.t[k][s], 0.0, 60.0));
                    duals.nu[k][s] = duals.lambda[k] / pts[k][s].alpha_bar;
                }
            }

            res.precoders = kkt_precoder_update(h_eff, duals.nu, p_bs, &duals.eta);

            mse = all_stream_mse(channels, res.precoders, res.combiners, noise_var);
            double rc_acc = 0.0;
            std::vector<double> per_ue_t(n_ues, 0.0);
            for (size_t k = 0; k < n_ues; ++k)
            {
                for (size_t s = 0; s < mse[k].size(); ++s)
                {
                    duals.t[k][s] = (pts[k][s].beta_bar - mse[k][s]) / pts[k][s].alpha_bar;
                    per_ue_t[k] += duals.t[k][s];
                }
                rc_acc += per_ue_t[k];
            }
            duals.r_c = rc_acc / static_cast<double>(n_ues);
            res.rc_trace.push_back(duals.r_c);

            // Subgradient of the Lagrangian in lambda_k is (r_c - sum_s t_{k,s}).
            const double step = duals.mu_step / std::sqrt(static_cast<double>(iter));
            for (size_t k = 0; k < n_ues; ++k)
                duals.lambda[k] += step * (duals.r_c - per_ue_t[k]);
            project_simplex(duals.lambda);

            const RateReport rep = sinr_rate(channels, res.precoders,
                                             mmse_combiners(channels, res.precoders, noise_var), noise_var);
            if (rep.min_rate > best_min_rate)
            {
                best_min_rate = rep.min_rate;
                best_pre = res.precoders;
                best_comb = res.combiners;
            }

            if (iter > 1 && std::abs(duals.r_c - prev_rc) < opts.tol)
            {
                res.converged = true;
                break;
            }
            prev_rc = duals.r_c;
        }

        if (!res.converged)
        {
            res.precoders = best_pre;
            res.combiners = best_comb;
        }
        res.combiners = mmse_combiners(channels, res.precoders, noise_var);
        res.duals = duals;
        return res;
    }

    PruneResult prune_streams(const RateReport &rates, const PrecoderSet &pre, double p_bs,
                              double threshold_bps, bool literal_scaling)
    {
        if (threshold_bps < 0.0)
            throw std::invalid_argument("prune_streams: threshold must be >= 0");
        PruneResult out;
        out.kept.resize(pre.m.size());
        out.precoders.m.resize(pre.m.size());
        for (size_t k = 0; k < pre.m.size(); ++k)
        {
            int best_s = 0;
            double best_rate = -1.0;
            for (size_t s = 0; s < pre.m[k].size(); ++s)
            {
                const double r = log2_1p(rates.sinr[k][s]);
                if (r > best_rate)
                {
                    best_rate = r;
                    best_s = static_cast<int>(s);
                }
                if (r >= threshold_bps)
                    out.kept[k].push_back(static_cast<int>(s));
            }
            if (out.kept[k].empty())
                out.kept[k].push_back(best_s); // every UE keeps its best stream
            for (int s : out.kept[k])
                out.precoders.m[k].push_back(pre.m[k][static_cast<size_t>(s)]);
        }
        const double power = out.precoders.total_power();
        out.c2 = power > 0.0 ? p_bs / power : 1.0;
        const double amp = literal_scaling ? out.c2 : std::sqrt(out.c2);
        for (auto &ue : out.precoders.m)
            for (auto &v : ue)
                v *= amp;
        return out;
    }

} // namespace nflos
