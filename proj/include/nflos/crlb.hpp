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

#ifndef NFLOS_CRLB_HPP
#define NFLOS_CRLB_HPP

#include "nflos/estimation.hpp"
#include "nflos/geometry.hpp"

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace nflos
{
    // Estimand order: [omega11, omega1M, gamma, Re(xi), Im(xi)].

    struct DistancePartials
    {
        double d_omega11 = 0.0;
        double d_omega1M = 0.0;
        double d_gamma = 0.0;
    };

    // Closed-form partial derivatives of d_{n,m} with respect to the three
    // reference angles (d11 treated as a function of the two AoDs). Throws
    // std::domain_error at the tan/sec singularities omega1M = +-pi/2.
    DistancePartials distance_partials(const AngleTriplet &t, double lbs_m, double lb, double lu);

    struct MuPartials
    {
        std::array<Eigen::VectorXcd, 5> d; // d mu / d eps_i
    };

    MuPartials mu_partials(const AngleTriplet &t, std::complex<double> xi, const PilotConfig &cfg,
                           const LinearArray &bs, const LinearArray &ue, double wavelength);

    struct FisherMatrix
    {
        Eigen::Matrix<double, 5, 5> info;   // F
        Eigen::Matrix<double, 5, 5> cov;    // F^-1
        double condition_number = 0.0;
        bool reliable = true; // false when cond(F) > 1e12
    };

    // FIM assembled from the closed-form blocks (cross terms carry the sign
    // required by the generic definition Re[(2/sigma^2) dmu^H dmu]).
    FisherMatrix fisher_matrix(const AngleTriplet &t, std::complex<double> xi, double noise_var_eff,
                               const PilotConfig &cfg, const LinearArray &bs, const LinearArray &ue,
                               double wavelength);

    // Generic-definition assembly from mu_partials; the oracle the block
    // formulas are validated against.
    Eigen::Matrix<double, 5, 5> fisher_matrix_generic(const MuPartials &mp, double noise_var_eff);

    // Per-angle bound (F^-1)_ii + Delta_i^2 / 12.
    std::array<double, 3> quantized_crlb(const FisherMatrix &fm, const QuantizerSpec &spec);

    // xi of the clean model at the true triplet (what the bounds are
    // evaluated at): amplitude * wavelength / (4 pi).
    std::complex<double> clean_model_xi(double amplitude, double wavelength);

} // namespace nflos

#endif
