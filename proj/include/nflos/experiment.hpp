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

#ifndef NFLOS_EXPERIMENT_HPP
#define NFLOS_EXPERIMENT_HPP

#include "nflos/config.hpp"
#include "nflos/crlb.hpp"
#include "nflos/ota.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nflos
{
    // Fixed CSV headers; every experiment kind writes one of these two.
    extern const char *kMetricsHeader; // estimate / crlb / precode rows
    extern const char *kOtaTraceHeader;

    // Random UE pose drawn from the configured ranges; rejects poses outside
    // the room or behind the array.
    Placement sample_placement(const PlacementRange &range, const LinearArray &bs,
                               const LinearArray &ue, const RoomModel &room, double mount_height,
                               rng::Stream &rng);

    Scenario build_scenario(const HarnessConfig &cfg, std::uint64_t trial);

    // Copy of cfg with one sweep axis applied.
    HarnessConfig apply_sweep(const HarnessConfig &cfg, double value);

    // Dequantized feedback with a minimal feasibility repair: when the
    // quantized AoD pair implies a non-positive reference distance, the
    // omega1M code is stepped until the pose becomes feasible again.
    AngleTriplet dequantize_feasible(const QuantizedTriplet &fb, const QuantizerSpec &spec, double lbs_m);

    // Algorithm-1 pipeline for one UE; throws on unrecoverable feedback.
    struct AcquisitionResult
    {
        AngleTriplet estimate;   // before quantization
        QuantizedTriplet fb;     // what the UE sends
        AngleTriplet dequantized;
        Eigen::MatrixXcd h_hat;  // reconstructed LoS channel
        double residual = 0.0;
    };

    AcquisitionResult acquire_csi(const Eigen::MatrixXcd &true_channel, const TripletEstimator &est,
                                  const PilotConfig &pilot_cfg, const QuantizerSpec &quant,
                                  const LinearArray &bs, const LinearArray &ue, double wavelength,
                                  double noise_var, rng::Stream &noise_rng,
                                  const AngleTriplet *hint);

    // kind: estimate | crlb | precode | ota | surface. Writes CSV rows to
    // `out` (incrementally, deterministic trial order). Throws on the first
    // trial error unless cfg.skip_failures.
    void run_experiment(const HarnessConfig &cfg, const std::string &kind, std::ostream &out);

    // Aggregates a metrics CSV: group by `group_cols`, emit mean/p10/p50/p90
    // for each of `value_cols`.
    void emit_plotdata(std::istream &csv, const std::vector<std::string> &group_cols,
                       const std::vector<std::string> &value_cols, std::ostream &out);

} // namespace nflos

#endif
