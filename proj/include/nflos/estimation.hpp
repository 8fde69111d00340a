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

#ifndef NFLOS_ESTIMATION_HPP
#define NFLOS_ESTIMATION_HPP

#include "nflos/geometry.hpp"
#include "nflos/grid.hpp"
#include "nflos/rng.hpp"

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace nflos
{
    // Downlink pilot setup. `amplitude` is the scale applied to the channel
    // in Y = amplitude * H[:, active] * P + Z; callers convert a power budget
    // to an amplitude at the config boundary.
    struct PilotConfig
    {
        std::vector<int> active_set; // 0-based BS antenna indices, first == 0, last == M-1
        int tau = 0;                 // pilot sequence length
        Eigen::MatrixXcd pilots;     // |active| x tau, P * P^H = tau * I
        double amplitude = 1.0;

        int num_active() const { return static_cast<int>(active_set.size()); }
        void validate(int num_bs_antennas) const;
    };

    // Active antennas 0 and M-1 plus near-uniformly spread interior indices;
    // DFT pilot rows; tau = max(4, n_active) unless overridden.
    PilotConfig make_pilot_config(int num_bs_antennas, int n_active, double amplitude, int tau = 0);

    struct Measurement
    {
        Eigen::MatrixXcd raw;        // N x tau
        Eigen::MatrixXcd correlated; // N x |active|
        Eigen::VectorXcd stacked;    // vec(correlated)
        double noise_var_eff = 0.0;  // variance of the correlated noise entries
    };

    Measurement transmit_pilots(const Eigen::MatrixXcd &channel, const PilotConfig &cfg,
                                double noise_var, rng::Stream &rng);

    // Parametric response over the active pairs: diag entries of D (inverse
    // distances) and the unit-modulus phase vector h, stacked per active
    // antenna with the UE index running fastest.
    struct ModelResponse
    {
        Eigen::VectorXd inv_dist;
        Eigen::VectorXcd phase;
        int n_ue = 0;
    };

    ModelResponse model_response(const AngleTriplet &t, const PilotConfig &cfg,
                                 const LinearArray &bs, const LinearArray &ue, double wavelength);

    enum class XiForm
    {
        least_squares, // h^H D y / ||D||_F^2 (stationary point of the LS fit)
        paper_literal, // extra 1/N factor
    };

    std::complex<double> fit_xi(const Eigen::VectorXcd &y, const ModelResponse &mr,
                                XiForm form = XiForm::least_squares);

    // ||y - xi(y) * D h||^2 with xi from fit_xi.
    double model_residual(const Eigen::VectorXcd &y, const ModelResponse &mr,
                          XiForm form = XiForm::least_squares);

    AngleTriplet ml_estimate(const Measurement &meas, const AngularGrid &grid, const PilotConfig &cfg,
                             const LinearArray &bs, const LinearArray &ue, double wavelength,
                             XiForm form = XiForm::least_squares);

    // Uniform q-bit quantizer per angle over [lo_i, hi_i]; 2^q levels include
    // both endpoints. bits <= 0 means an ideal (infinite) quantizer.
    struct QuantizerSpec
    {
        int bits = 9;
        std::array<double, 3> lo{};
        std::array<double, 3> hi{};

        double step(int i) const;
        static QuantizerSpec from_grid(const GridSpec &spec, int bits);
    };

    struct QuantizedTriplet
    {
        std::array<std::uint32_t, 3> codes{};
        std::array<double, 3> exact{}; // pass-through values for ideal quantizers
        int clamped = 0;               // diagnostics: inputs outside the range
    };

    QuantizedTriplet quantize(const AngleTriplet &t, const QuantizerSpec &spec);
    AngleTriplet dequantize(const QuantizedTriplet &q, const QuantizerSpec &spec);

    // BS-side reconstruction of the full LoS matrix from fed-back angles.
    Eigen::MatrixXcd reconstruct_los(const AngleTriplet &t, const LinearArray &bs,
                                     const LinearArray &ue, double wavelength);

    // Residual evaluator over a fixed grid. Precomputes the per-point model
    // terms once so that many measurements can be scanned cheaply; falls back
    // to streaming evaluation when the cache would exceed `cache_limit_bytes`.
    class MlGridSearch
    {
    public:
        MlGridSearch(const AngularGrid &grid, const PilotConfig &cfg, const LinearArray &bs,
                     const LinearArray &ue, double wavelength,
                     std::size_t cache_limit_bytes = 1500u << 20);

        struct Hit
        {
            std::size_t index = 0;
            double residual = 0.0;
        };

        // Global argmin (ties -> lowest index).
        Hit best(const Eigen::VectorXcd &y) const;
        // The r best points, most promising first. A non-zero per-axis
        // separation suppresses candidates adjacent to a better one, so the
        // list spans distinct basins instead of one cluster.
        std::vector<Hit> top(const Eigen::VectorXcd &y, int r,
                             std::array<double, 3> min_sep = {0.0, 0.0, 0.0}) const;

        const AngularGrid &grid() const { return *grid_; }
        bool cached() const { return !pack_.empty(); }

    private:
        std::shared_ptr<const AngularGrid> grid_;
        PilotConfig cfg_;
        LinearArray bs_, ue_;
        double wavelength_;
        int pairs_ = 0;
        std::vector<float> pack_;   // per point: pairs * (re, im) of d^-1 * conj(h)
        std::vector<float> norm_;   // per point: sum d^-2
        std::vector<std::uint32_t> skip_; // points whose response failed (kept, never selected)
    };

    // Hierarchical search strategy. The reference-row distances d_{1,m} do
    // not depend on gamma, so the acquisition stage is a dense cached 2D scan
    // over the AoD pair using the first UE antenna row only, followed by a 1D
    // gamma sweep per surviving candidate and a full-likelihood 3D zoom.
    struct SearchPolicy
    {
        double omega_min = -85.0 * M_PI / 180.0;
        double omega_max = 85.0 * M_PI / 180.0;
        double gamma_min = 0.0;
        double gamma_max = M_PI;
        double pair_step = 0.1 * M_PI / 180.0;   // stage-A 2D grid step
        double gamma_step = 0.5 * M_PI / 180.0;  // stage-B gamma sweep step
        int top_candidates = 8;                  // multi-start width (basin-separated)
        int zoom_samples = 12;  // axis sample count per zoom level (even keeps the center)
        double zoom_cells = 3.0; // window = zoom_cells * previous step, per axis
        double target_step = 0.08 * M_PI / 180.0; // stop once every axis step is below this
        int max_zoom_levels = 16;
        double window = 0.0; // > 0: restrict the search to +-window around a hint
    };

    class TripletEstimator
    {
    public:
        TripletEstimator(SearchPolicy policy, PilotConfig cfg, LinearArray bs, LinearArray ue,
                         double wavelength, XiForm form = XiForm::least_squares);
        ~TripletEstimator();
        TripletEstimator(TripletEstimator &&) noexcept;
        TripletEstimator &operator=(TripletEstimator &&) noexcept;

        // hint is required when the policy uses a window; ignored otherwise.
        AngleTriplet estimate(const Measurement &meas, const AngleTriplet *hint = nullptr) const;
        double last_residual() const { return last_residual_; }
        const SearchPolicy &policy() const { return policy_; }

    private:
        struct PairScan; // stage-A cache

        AngleTriplet zoom(const Eigen::VectorXcd &y, const AngleTriplet &start,
                          std::array<double, 3> step, std::array<std::pair<double, double>, 3> bounds,
                          double &residual) const;

        SearchPolicy policy_;
        PilotConfig cfg_;
        LinearArray bs_, ue_;
        double wavelength_;
        XiForm form_;
        std::unique_ptr<PairScan> pair_scan_; // global mode only
        mutable double last_residual_ = 0.0;
    };

} // namespace nflos

#endif
