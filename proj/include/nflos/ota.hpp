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

#ifndef NFLOS_OTA_HPP
#define NFLOS_OTA_HPP

#include "nflos/precoding.hpp"
#include "nflos/rng.hpp"

#include <Eigen/Dense>
#include <vector>

namespace nflos
{
    struct OtaConfig
    {
        int pilot_len = 0;        // tilde tau; must be >= total stream count
        double ue_power_w = 0.0;  // total UE-side pilot power budget (sets psi)
        int iterations = 30;
        double noise_bs_w = 0.0;
        double loading = 1e-9;    // diagonal loading for the forward combiner solve

        void validate(int total_streams) const;
    };

    // Orthogonal per-stream pilot rows, one per (ue, stream), ||p||^2 = tau.
    Eigen::MatrixXcd make_stream_pilots(int total_streams, int pilot_len);

    // Downlink precoded pilots over the true channel of one UE:
    // Y = H (sum_{k,s} m p^H) + Z.
    Eigen::MatrixXcd forward_tx(const Eigen::MatrixXcd &true_channel, const PrecoderSet &pre,
                                const Eigen::MatrixXcd &pilots, double noise_var, rng::Stream &rng);

    // u = (Y Y^H + loading I)^-1 Y p for one stream pilot.
    Eigen::VectorXcd ue_combiner_from_forward(const Eigen::MatrixXcd &y_fwd,
                                              const Eigen::VectorXcd &pilot, double loading);

    // Uplink combiner-precoded pilots received at the BS:
    // Y = psi sum_k H_k^H sum_s u p^H + Z_BS.
    Eigen::MatrixXcd backward_tx(const CombinerSet &comb, const std::vector<Eigen::MatrixXcd> &true_channels,
                                 const Eigen::MatrixXcd &pilots, const std::vector<std::vector<int>> &pilot_rows,
                                 double psi, double noise_var, rng::Stream &rng);

    // h_eff = Y p* / (psi tau) per stream.
    PerStream<Eigen::VectorXcd> estimate_effective_channels(const Eigen::MatrixXcd &y_bwd,
                                                            const Eigen::MatrixXcd &pilots,
                                                            const std::vector<std::vector<int>> &pilot_rows,
                                                            double psi);

    // The physical medium: owns the true channels and the noise streams. BS
    // update logic only ever sees what comes back from these calls.
    class AirInterface
    {
    public:
        AirInterface(std::vector<Eigen::MatrixXcd> true_channels, std::vector<double> noise_ue_w,
                     double noise_bs_w, std::uint64_t seed, std::uint64_t trial);

        std::vector<Eigen::MatrixXcd> forward(const PrecoderSet &pre, const Eigen::MatrixXcd &pilots);
        Eigen::MatrixXcd backward(const CombinerSet &comb, const Eigen::MatrixXcd &pilots,
                                  const std::vector<std::vector<int>> &pilot_rows, double psi);
        // True-channel rate evaluation; measurement side only, never fed back
        // into the precoder update.
        RateReport evaluate(const PrecoderSet &pre, const CombinerSet &comb) const;

        int num_ues() const { return static_cast<int>(channels_.size()); }
        Eigen::Index rows(int k) const { return channels_[static_cast<size_t>(k)].rows(); }
        Eigen::Index bs_antennas() const { return channels_.front().cols(); }
        const std::vector<double> &noise_ue() const { return noise_ue_; }

    private:
        std::vector<Eigen::MatrixXcd> channels_;
        std::vector<double> noise_ue_;
        double noise_bs_;
        rng::Stream fwd_rng_, bwd_rng_;
    };

    struct OtaTraceRow
    {
        int iteration = 0;
        double r_min = 0.0;
        double r_mean = 0.0;
        double power = 0.0;
    };

    struct OtaResult
    {
        PrecoderSet precoders;
        CombinerSet combiners;
        std::vector<OtaTraceRow> trace;
    };

    // Bidirectional refinement: forward pilots -> UE combiners -> backward
    // pilots -> effective channels -> KKT precoder update, with the dual
    // machinery re-derived from OTA-estimated MSEs each round.
    OtaResult ota_refine(const PrecoderSet &init, AirInterface &air, const OtaConfig &cfg,
                         DualState duals, const ScaOptions &opts = {});

    // One forward pass only: the combiners a UE would form for the given
    // precoders (normalized), e.g. for rate evaluation after stage 1.
    CombinerSet ota_single_shot_combiners(AirInterface &air, const PrecoderSet &pre,
                                          int pilot_len, double loading_rel = 1e-9);

} // namespace nflos

#endif
