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

#include "nflos/figures.hpp"

#include "nflos/experiment.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nflos
{
    std::vector<std::string> figure_names()
    {
        return {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
    }

    namespace
    {
        HarnessConfig single_ue_los(const HarnessConfig &base)
        {
            HarnessConfig c = base;
            c.num_ues = 1;
            c.nlos_enabled = false;
            return c;
        }
    } // namespace

    FigureRecipe figure_recipe(const std::string &name, const HarnessConfig &base)
    {
        FigureRecipe r;
        r.name = name;
        if (name == "fig4")
        {
            // Angle MSE and CRLB vs pilot count for several quantizers.
            for (int q : {6, 8, 0})
            {
                HarnessConfig c = single_ue_los(base);
                c.sweep_axis = "pilot_count";
                c.sweep_values = {2, 3, 4, 5, 6, 7, 8};
                c.quant_bits = q;
                c.trials = std::max(base.trials, 50);
                c.label = q > 0 ? "q=" + std::to_string(q) : "q=inf";
                r.steps.push_back({c, "estimate"});
            }
            r.group_cols = {"sweep", "mode"};
            r.value_cols = {"se_omega11", "se_omega1m", "se_gamma",
                            "crlb_omega11", "crlb_omega1m", "crlb_gamma"};
        }
        else if (name == "fig5")
        {
            // Single-UE achievable rate vs pilot count.
            for (int q : {0, 9, 10})
            {
                HarnessConfig c = single_ue_los(base);
                c.sweep_axis = "pilot_count";
                c.sweep_values = {2, 3, 4, 5, 6};
                c.quant_bits = q;
                c.trials = std::max(base.trials, 40);
                c.label = q > 0 ? "q=" + std::to_string(q) : "q=inf";
                r.steps.push_back({c, "precode"});
            }
            r.group_cols = {"sweep", "mode"};
            r.value_cols = {"rmean_bps", "rmin_bps"};
        }
        else if (name == "fig6")
        {
            HarnessConfig c = single_ue_los(base);
            c.sweep_axis = "pilot_count";
            c.sweep_values = {2, 4};
            r.steps.push_back({c, "surface"});
            r.group_cols = {};
            r.value_cols = {};
        }
        else if (name == "fig7")
        {
            for (int pilots : {2, 4, 6})
            {
                HarnessConfig c = single_ue_los(base);
                c.sweep_axis = "array_length";
                c.sweep_values = {0.5, 1.0, 2.0, 3.0};
                c.pilot_count = pilots;
                c.quant_bits = 0;
                c.trials = std::max(base.trials, 20);
                c.label = "pilots=" + std::to_string(pilots);
                r.steps.push_back({c, "crlb"});
            }
            r.group_cols = {"sweep", "mode"};
            r.value_cols = {"crlb_omega11", "crlb_omega1m", "crlb_gamma"};
        }
        else if (name == "fig8")
        {
            for (double beta_deg : {60.0, -17.34})
                for (int pilots : {2, 4})
                {
                    HarnessConfig c = single_ue_los(base);
                    c.fixed_placement = true;
                    c.fixed_place = {5.5, deg_to_rad(beta_deg), 0.0};
                    c.sweep_axis = "gamma_deg";
                    c.sweep_values.clear();
                    for (double g = 2.0; g <= 178.0; g += 4.0)
                        c.sweep_values.push_back(g);
                    c.pilot_count = pilots;
                    c.quant_bits = 0;
                    c.trials = 1;
                    std::ostringstream label;
                    label << "beta=" << beta_deg << ",pilots=" << pilots;
                    c.label = label.str();
                    r.steps.push_back({c, "crlb"});
                }
            r.group_cols = {"sweep", "mode"};
            r.value_cols = {"crlb_omega11", "crlb_omega1m", "crlb_gamma"};
        }
        else if (name == "fig9")
        {
            HarnessConfig c = base;
            c.nlos_enabled = false;
            c.sweep_axis = "pilot_count";
            c.sweep_values = {2, 3, 4, 6, 8};
            c.trials = std::max(base.trials, 10);
            r.steps.push_back({c, "precode"});
            r.group_cols = {"sweep", "mode"};
            r.value_cols = {"rmin_bps", "rmean_bps"};
        }
        else if (name == "fig10")
        {
            HarnessConfig c = base;
            c.nlos_enabled = true;
            c.num_ues = std::min(base.num_ues, 4);
            c.bs_antennas = std::min(base.bs_antennas, 32);
            c.sweep_axis = "none";
            c.sweep_values = {0};
            c.init_mode = "all";
            c.trials = std::max(base.trials, 30);
            r.steps.push_back({c, "ota"});
            r.group_cols = {"init_mode", "iter"};
            r.value_cols = {"r_min", "r_mean"};
        }
        else
        {
            throw std::invalid_argument("unknown figure: " + name);
        }
        return r;
    }

    void run_figure(const FigureRecipe &recipe, std::ostream &out)
    {
        bool first = true;
        for (const auto &step : recipe.steps)
        {
            std::ostringstream buf;
            run_experiment(step.cfg, step.kind, buf);
            std::istringstream in(buf.str());
            std::string line;
            bool header = true;
            while (std::getline(in, line))
            {
                if (header)
                {
                    if (first)
                        out << line << '\n';
                    header = false;
                    first = false;
                    continue;
                }
                out << line << '\n';
            }
        }
        out.flush();
    }

} // namespace nflos
