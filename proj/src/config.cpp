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

#include "nflos/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nflos
{
    using nlohmann::json;

    double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
    double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

    SearchPolicy GridSearchConfig::to_policy() const
    {
        SearchPolicy p;
        p.omega_min = omega_min;
        p.omega_max = omega_max;
        p.gamma_min = gamma_min;
        p.gamma_max = gamma_max;
        p.pair_step = coarse_step_omega;
        p.gamma_step = coarse_step_gamma;
        p.top_candidates = top_candidates;
        p.zoom_samples = zoom_samples;
        p.zoom_cells = zoom_cells;
        p.target_step = target_step;
        p.window = window;
        return p;
    }

    GridSpec GridSearchConfig::to_grid_spec() const
    {
        GridSpec g;
        g.omega_min = omega_min;
        g.omega_max = omega_max;
        g.gamma_min = gamma_min;
        g.gamma_max = gamma_max;
        g.l_omega = std::max(1, static_cast<int>(std::lround((omega_max - omega_min) / coarse_step_omega)));
        g.l_gamma = std::max(1, static_cast<int>(std::lround((gamma_max - gamma_min) / coarse_step_gamma)));
        return g;
    }

    void HarnessConfig::validate() const
    {
        if (bs_antennas < 2 || ue_antennas < 1 || num_ues < 1)
            throw std::invalid_argument("config: antenna/UE counts out of range");
        if (!(wavelength > 0.0) || !(bs_length > 0.0))
            throw std::invalid_argument("config: wavelength and array length must be positive");
        if (ue_antennas > 1 && !(ue_spacing > 0.0))
            throw std::invalid_argument("config: UE spacing must be positive");
        if (trials < 1)
            throw std::invalid_argument("config: trials must be >= 1");
        if (threads < 1)
            throw std::invalid_argument("config: threads must be >= 1");
        if (pilot_count < 2 || pilot_count > bs_antennas)
            throw std::invalid_argument("config: pilot_count must be in [2, M]");
        if (sweep_values.empty())
            throw std::invalid_argument("config: sweep_values must not be empty");
        if (init_mode != "los" && init_mode != "rank_guided" && init_mode != "random" && init_mode != "perfect")
            throw std::invalid_argument("config: unknown init_mode");
        room.validate();
    }

    namespace
    {
        template <typename T>
        void get_if(const json &j, const char *key, T &out)
        {
            if (j.contains(key))
                out = j.at(key).get<T>();
        }

        void get_deg(const json &j, const char *key, double &out_rad)
        {
            if (j.contains(key))
                out_rad = deg_to_rad(j.at(key).get<double>());
        }
    } // namespace

    HarnessConfig parse_config_json(const std::string &text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw std::runtime_error(std::string("config parse error: ") + e.what());
        }
        HarnessConfig cfg;
        if (j.contains("scenario"))
        {
            const json &s = j.at("scenario");
            get_if(s, "wavelength_m", cfg.wavelength);
            get_if(s, "bs_antennas", cfg.bs_antennas);
            get_if(s, "bs_length_m", cfg.bs_length);
            get_if(s, "ue_antennas", cfg.ue_antennas);
            get_if(s, "ue_spacing_m", cfg.ue_spacing);
            get_if(s, "num_ues", cfg.num_ues);
            get_if(s, "p_bs_dbm", cfg.p_bs_dbm);
            get_if(s, "rho_dbm", cfg.rho_dbm);
            get_if(s, "noise_ue_dbm", cfg.noise_ue_dbm);
            get_if(s, "noise_bs_dbm", cfg.noise_bs_dbm);
            get_if(s, "nlos_enabled", cfg.nlos_enabled);
            get_if(s, "mount_height_m", cfg.mount_height);
            if (s.contains("room"))
            {
                const json &r = s.at("room");
                get_if(r, "width_m", cfg.room.width);
                get_if(r, "depth_m", cfg.room.depth);
                get_if(r, "height_m", cfg.room.height);
                get_if(r, "reflection_coeff", cfg.room.reflection_coeff);
                get_if(r, "max_order", cfg.room.max_order);
                get_if(r, "include_floor", cfg.room.include_floor);
            }
            if (s.contains("placement"))
            {
                const json &p = s.at("placement");
                get_if(p, "d_min_m", cfg.place.d_min);
                get_if(p, "d_max_m", cfg.place.d_max);
                get_deg(p, "beta_max_deg", cfg.place.beta_max);
                get_deg(p, "gamma_min_deg", cfg.place.gamma_min);
                get_deg(p, "gamma_max_deg", cfg.place.gamma_max);
            }
            if (s.contains("fixed_placement"))
            {
                const json &p = s.at("fixed_placement");
                cfg.fixed_placement = true;
                get_if(p, "d_m", cfg.fixed_place.d);
                get_deg(p, "beta_deg", cfg.fixed_place.beta);
                get_deg(p, "gamma_deg", cfg.fixed_place.gamma);
            }
        }
        if (j.contains("estimation"))
        {
            const json &e = j.at("estimation");
            get_if(e, "pilot_count", cfg.pilot_count);
            get_if(e, "pilot_tau", cfg.pilot_tau);
            get_if(e, "quant_bits", cfg.quant_bits);
            if (e.contains("xi_form"))
                cfg.xi_form = e.at("xi_form").get<std::string>() == "paper_literal"
                                  ? XiForm::paper_literal
                                  : XiForm::least_squares;
            if (e.contains("grid"))
            {
                const json &g = e.at("grid");
                get_deg(g, "omega_min_deg", cfg.grid.omega_min);
                get_deg(g, "omega_max_deg", cfg.grid.omega_max);
                get_deg(g, "gamma_min_deg", cfg.grid.gamma_min);
                get_deg(g, "gamma_max_deg", cfg.grid.gamma_max);
                get_deg(g, "coarse_step_omega_deg", cfg.grid.coarse_step_omega);
                get_deg(g, "coarse_step_gamma_deg", cfg.grid.coarse_step_gamma);
                get_if(g, "top_candidates", cfg.grid.top_candidates);
                get_if(g, "zoom_samples", cfg.grid.zoom_samples);
                get_if(g, "zoom_cells", cfg.grid.zoom_cells);
                get_deg(g, "target_step_deg", cfg.grid.target_step);
                get_deg(g, "window_deg", cfg.grid.window);
            }
        }
        if (j.contains("precoding"))
        {
            const json &p = j.at("precoding");
            get_if(p, "alpha", cfg.alpha);
            get_if(p, "prune_threshold_bps", cfg.prune_threshold);
            get_if(p, "sca_tol", cfg.sca.tol);
            get_if(p, "sca_max_iters", cfg.sca.max_iters);
            get_if(p, "subgradient_step", cfg.sca.subgradient_step);
            get_if(p, "literal_scaling", cfg.sca.literal_scaling);
        }
        if (j.contains("ota"))
        {
            const json &o = j.at("ota");
            get_if(o, "iterations", cfg.ota_iterations);
            get_if(o, "pilot_len", cfg.ota_pilot_len);
            get_if(o, "ue_power_dbm", cfg.ue_power_dbm);
            get_if(o, "init_mode", cfg.init_mode);
        }
        if (j.contains("experiment"))
        {
            const json &e = j.at("experiment");
            get_if(e, "sweep_axis", cfg.sweep_axis);
            if (e.contains("sweep_values"))
                cfg.sweep_values = e.at("sweep_values").get<std::vector<double>>();
            get_if(e, "trials", cfg.trials);
            get_if(e, "seed", cfg.seed);
            get_if(e, "threads", cfg.threads);
            get_if(e, "skip_failures", cfg.skip_failures);
        }
        cfg.validate();
        return cfg;
    }

    HarnessConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config_json(ss.str());
    }

    std::string config_to_json(const HarnessConfig &cfg)
    {
        json j;
        j["scenario"] = {
            {"wavelength_m", cfg.wavelength},
            {"bs_antennas", cfg.bs_antennas},
            {"bs_length_m", cfg.bs_length},
            {"ue_antennas", cfg.ue_antennas},
            {"ue_spacing_m", cfg.ue_spacing},
            {"num_ues", cfg.num_ues},
            {"p_bs_dbm", cfg.p_bs_dbm},
            {"rho_dbm", cfg.rho_dbm},
            {"noise_ue_dbm", cfg.noise_ue_dbm},
            {"noise_bs_dbm", cfg.noise_bs_dbm},
            {"nlos_enabled", cfg.nlos_enabled},
            {"mount_height_m", cfg.mount_height},
            {"room",
             {{"width_m", cfg.room.width},
              {"depth_m", cfg.room.depth},
              {"height_m", cfg.room.height},
              {"reflection_coeff", cfg.room.reflection_coeff},
              {"max_order", cfg.room.max_order},
              {"include_floor", cfg.room.include_floor}}},
            {"placement",
             {{"d_min_m", cfg.place.d_min},
              {"d_max_m", cfg.place.d_max},
              {"beta_max_deg", rad_to_deg(cfg.place.beta_max)},
              {"gamma_min_deg", rad_to_deg(cfg.place.gamma_min)},
              {"gamma_max_deg", rad_to_deg(cfg.place.gamma_max)}}}};
        j["estimation"] = {
            {"pilot_count", cfg.pilot_count},
            {"pilot_tau", cfg.pilot_tau},
            {"quant_bits", cfg.quant_bits},
            {"xi_form", cfg.xi_form == XiForm::paper_literal ? "paper_literal" : "least_squares"},
            {"grid",
             {{"omega_min_deg", rad_to_deg(cfg.grid.omega_min)},
              {"omega_max_deg", rad_to_deg(cfg.grid.omega_max)},
              {"gamma_min_deg", rad_to_deg(cfg.grid.gamma_min)},
              {"gamma_max_deg", rad_to_deg(cfg.grid.gamma_max)},
              {"coarse_step_omega_deg", rad_to_deg(cfg.grid.coarse_step_omega)},
              {"coarse_step_gamma_deg", rad_to_deg(cfg.grid.coarse_step_gamma)},
              {"top_candidates", cfg.grid.top_candidates},
              {"zoom_samples", cfg.grid.zoom_samples},
              {"zoom_cells", cfg.grid.zoom_cells},
              {"target_step_deg", rad_to_deg(cfg.grid.target_step)},
              {"window_deg", rad_to_deg(cfg.grid.window)}}}};
        j["precoding"] = {
            {"alpha", cfg.alpha},
            {"prune_threshold_bps", cfg.prune_threshold},
            {"sca_tol", cfg.sca.tol},
            {"sca_max_iters", cfg.sca.max_iters},
            {"subgradient_step", cfg.sca.subgradient_step},
            {"literal_scaling", cfg.sca.literal_scaling}};
        j["ota"] = {
            {"iterations", cfg.ota_iterations},
            {"pilot_len", cfg.ota_pilot_len},
            {"ue_power_dbm", cfg.ue_power_dbm},
            {"init_mode", cfg.init_mode}};
        j["experiment"] = {
            {"sweep_axis", cfg.sweep_axis},
            {"sweep_values", cfg.sweep_values},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"threads", cfg.threads},
            {"skip_failures", cfg.skip_failures}};
        return j.dump(2);
    }

} // namespace nflos
