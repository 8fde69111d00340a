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

#ifndef NFLOS_PRECODING_HPP
#define NFLOS_PRECODING_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace nflos
{
    // Per-stream container indexed [ue][stream].
    template <typename T>
    using PerStream = std::vector<std::vector<T>>;

    struct StreamAllocation
    {
        std::vector<int> counts;                  // S_k
        std::vector<Eigen::MatrixXcd> init_dirs;  // M x S_k right singular vectors
        std::vector<Eigen::VectorXd> sing_values; // full singular value lists
        double alpha = 0.0;
        std::vector<bool> degenerate; // true where a zero channel forced S_k = 1

        int total_streams() const;
    };

    // S_k = #{n : delta_{k,n} >= max_n(delta)/alpha}, capped at min(N_k, M).
    StreamAllocation allocate_streams(const std::vector<Eigen::MatrixXcd> &channels, double alpha);

    struct PrecoderSet
    {
        PerStream<Eigen::VectorXcd> m;

        double total_power() const;
        int num_ues() const { return static_cast<int>(m.size()); }
    };

    struct CombinerSet
    {
        PerStream<Eigen::VectorXcd> u;
    };

    // Scaled right-singular-vector initialization meeting the power budget
    // exactly. literal_scaling reproduces the printed linear normalization.
    PrecoderSet init_precoders(const StreamAllocation &alloc, double p_bs, bool literal_scaling = false);

    CombinerSet mmse_combiners(const std::vector<Eigen::MatrixXcd> &channels, const PrecoderSet &pre,
                               const std::vector<double> &noise_var);

    struct RateReport
    {
        PerStream<double> sinr;
        std::vector<double> per_ue_rate; // bps/Hz
        double min_rate = 0.0;
        double mean_rate = 0.0;
    };

    RateReport sinr_rate(const std::vector<Eigen::MatrixXcd> &channels, const PrecoderSet &pre,
                         const CombinerSet &comb, const std::vector<double> &noise_var);

    // Per-stream MSE; cross terms use |u^H H m|^2 so that the MMSE combiner
    // satisfies mse = 1/(1+sinr).
    double stream_mse(const Eigen::MatrixXcd &channel_k, const Eigen::VectorXcd &u_ks,
                      const PrecoderSet &pre, int k, int s, double noise_var_k);

    PerStream<double> all_stream_mse(const std::vector<Eigen::MatrixXcd> &channels,
                                     const PrecoderSet &pre, const CombinerSet &comb,
                                     const std::vector<double> &noise_var);

    struct TaylorPoint
    {
        double alpha_bar = 0.0;
        double beta_bar = 0.0;
    };

    // The printed approximation-point pair (2^t * ln2, 2^t (1 + t ln2)).
    TaylorPoint taylor_points(double t_bar);

    // First-order expansion of 2^-t at t_bar; the decreasing surrogate the
    // max-min solver actually linearizes against (see taylor_points tests for
    // the relation between the two).
    TaylorPoint mse_surrogate(double t_bar);

    struct DualState
    {
        std::vector<double> lambda;   // simplex weights, sum = 1
        PerStream<double> nu;         // lambda_k / alpha_bar_{k,s}
        PerStream<double> t;          // per-stream surrogate rates
        double eta = 0.0;             // power multiplier
        double r_c = 0.0;             // common rate
        double mu_step = 0.1;         // subgradient step scale
    };

    // m_{k,s} = (sum nu h h^H + eta I)^-1 nu h with eta from bisection so the
    // power budget is met (eta ~ 0 accepted when the unconstrained power is
    // already feasible). Throws when bisection cannot bracket the budget.
    PrecoderSet kkt_precoder_update(const PerStream<Eigen::VectorXcd> &h_eff,
                                    const PerStream<double> &nu, double p_bs,
                                    double *eta_out = nullptr, double power_rel_tol = 1e-9);

    struct ScaOptions
    {
        double tol = 1e-5;       // stop on |delta r_c|
        int max_iters = 200;
        double subgradient_step = 0.1; // scaled by 1/sqrt(iter)
        bool literal_scaling = false;
    };

    struct ScaResult
    {
        PrecoderSet precoders;
        CombinerSet combiners;
        std::vector<double> rc_trace;
        DualState duals;
        bool converged = false;
        int iterations = 0;
    };

    ScaResult sca_maxmin_solve(const std::vector<Eigen::MatrixXcd> &channels,
                               const StreamAllocation &alloc, const std::vector<double> &noise_var,
                               double p_bs, const ScaOptions &opts = {});

    struct PruneResult
    {
        std::vector<std::vector<int>> kept; // surviving stream indices per UE
        PrecoderSet precoders;              // rescaled survivors
        double c2 = 1.0;                    // power rescale factor applied to ||m||^2
    };

    // Drops streams below the rate threshold (every UE keeps at least its
    // best stream) and rescales the survivors back to the power budget.
    PruneResult prune_streams(const RateReport &rates, const PrecoderSet &pre, double p_bs,
                              double threshold_bps, bool literal_scaling = false);

} // namespace nflos

#endif
