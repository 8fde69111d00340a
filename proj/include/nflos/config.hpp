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

#ifndef NFLOS_CONFIG_HPP
#define NFLOS_CONFIG_HPP

#include "nflos/channel.hpp"
#include "nflos/estimation.hpp"
#include "nflos/precoding.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nflos
{
    double dbm_to_watts(double dbm);
    double deg_to_rad(double deg);
    double rad_to_deg(double rad);

    // Placement sampling ranges (stored in radians; degrees in JSON).
    struct PlacementRange
    {
        double d_min = 4.5;
        double d_max = 8.5;
        double beta_max = deg_to_rad(80.0);
        double gamma_min = 0.0;
        double gamma_max = M_PI;
    };

    struct GridSearchConfig
    {
        double omega_min = deg_to_rad(-85.0);
        double omega_max = deg_to_rad(85.0);
        double gamma_min = 0.0;
        double gamma_max = M_PI;
        double coarse_step_omega = deg_to_rad(0.1); // stage-A AoD pair grid
        double coarse_step_gamma = deg_to_rad(0.5); // stage-B gamma sweep
        int top_candidates = 8;
        int zoom_samples = 12;
        double zoom_cells = 3.0;
        double target_step = deg_to_rad(0.08);
        double window = 0.0; // > 0: search only +-window around the true pose

        SearchPolicy to_policy() const;
        GridSpec to_grid_spec() const;
    };

    // One config block drives every experiment kind; unused sections are
    // simply ignored by a given subcommand.
    struct HarnessConfig
    {
        // scenario
        double wavelength = 0.03;
        int bs_antennas = 64;
        double bs_length = 2.0;
        int ue_antennas = 4;
        double ue_spacing = 0.015;
        int num_ues = 8;
        RoomModel room;
        double p_bs_dbm = -5.0;
        double rho_dbm = -3.0;
        double noise_ue_dbm = -85.0;
        double noise_bs_dbm = -85.0;
        PlacementRange place;
        bool nlos_enabled = true;
        double mount_height = 1.5;
        bool fixed_placement = false;   // reuse one placement for all trials
        Placement fixed_place{5.5, deg_to_rad(20.0), deg_to_rad(40.0)};

        // estimation
        int pilot_count = 4;
        int pilot_tau = 0; // 0: max(4, pilot_count)
        int quant_bits = 9; // <= 0: ideal quantizer
        XiForm xi_form = XiForm::least_squares;
        GridSearchConfig grid;

        // precoding
        double alpha = 100.0;
        double prune_threshold = 0.01; // bps/Hz
        ScaOptions sca;

        // ota
        int ota_iterations = 30;
        int ota_pilot_len = 0; // 0: number of BS antennas
        double ue_power_dbm = -3.0;
        std::string init_mode = "los"; // los | rank_guided | random | perfect

        // experiment
        std::string sweep_axis = "pilot_count"; // pilot_count|quant_bits|target_step_deg|array_length|ota_iterations|gamma_deg|none
        std::vector<double> sweep_values{4};
        int trials = 1;
        std::uint64_t seed = 1;
        int threads = 1;
        bool skip_failures = false;
        std::string label; // optional tag written to the mode column

        double p_bs_w() const { return dbm_to_watts(p_bs_dbm); }
        double rho_w() const { return dbm_to_watts(rho_dbm); }
        double noise_ue_w() const { return dbm_to_watts(noise_ue_dbm); }
        double noise_bs_w() const { return dbm_to_watts(noise_bs_dbm); }
        double ue_power_w() const { return dbm_to_watts(ue_power_dbm); }
        // Pilot amplitude: total radiated pilot power equals rho.
        double pilot_amplitude(int n_active) const { return std::sqrt(rho_w() / n_active); }

        void validate() const;
    };

    HarnessConfig load_config(const std::string &path);
    HarnessConfig parse_config_json(const std::string &text);
    std::string config_to_json(const HarnessConfig &cfg);

} // namespace nflos

#endif
