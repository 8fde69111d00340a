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

#include "nflos/experiment.hpp"
#include "nflos/figures.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace
{
    struct CommonOpts
    {
        std::string config_path;
        std::string out_path;
        long long seed = -1;
        int trials = -1;
        int threads = -1;
        bool skip_failures = false;
    };

    void add_common(CLI::App *cmd, CommonOpts &opts)
    {
        cmd->add_option("--config", opts.config_path, "JSON config file (defaults used when omitted)");
        cmd->add_option("--out", opts.out_path, "output CSV path (stdout when omitted)");
        cmd->add_option("--seed", opts.seed, "override root seed");
        cmd->add_option("--trials", opts.trials, "override trial count");
        cmd->add_option("--threads", opts.threads, "worker threads for trial-level parallelism");
        cmd->add_flag("--skip-failures", opts.skip_failures, "log failed trials instead of aborting");
    }

    nflos::HarnessConfig resolve(const CommonOpts &opts)
    {
        nflos::HarnessConfig cfg = opts.config_path.empty()
                                       ? nflos::HarnessConfig{}
                                       : nflos::load_config(opts.config_path);
        if (opts.seed >= 0)
            cfg.seed = static_cast<std::uint64_t>(opts.seed);
        if (opts.trials > 0)
            cfg.trials = opts.trials;
        if (opts.threads > 0)
            cfg.threads = opts.threads;
        if (opts.skip_failures)
            cfg.skip_failures = true;
        return cfg;
    }

    int run_kind(const CommonOpts &opts, const std::string &kind)
    {
        const nflos::HarnessConfig cfg = resolve(opts);
        std::ofstream file;
        if (!opts.out_path.empty())
        {
            file.open(opts.out_path);
            if (!file)
            {
                std::cerr << "cannot open output file " << opts.out_path << "\n";
                return 1;
            }
        }
        std::ostream &out = opts.out_path.empty() ? std::cout : file;
        nflos::run_experiment(cfg, kind, out);
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"near-field LoS MIMO CSI acquisition and max-min precoding experiments"};
    app.require_subcommand(1);

    CommonOpts est_opts, crlb_opts, pre_opts, ota_opts, fig_opts, plot_opts;

    CLI::App *est = app.add_subcommand("estimate", "angle estimation / reconstruction sweeps");
    add_common(est, est_opts);

    CLI::App *crlb = app.add_subcommand("crlb", "CRLB sweeps (no Monte Carlo estimation)");
    add_common(crlb, crlb_opts);

    CLI::App *pre = app.add_subcommand("precode", "stage-1 precoding rate sweeps");
    add_common(pre, pre_opts);

    CLI::App *ota = app.add_subcommand("ota", "bidirectional OTA refinement traces");
    add_common(ota, ota_opts);

    std::string fig_name;
    CLI::App *fig = app.add_subcommand("figure", "run a desk-scale figure recipe");
    fig->add_option("name", fig_name, "one of: fig4 fig5 fig6 fig7 fig8 fig9 fig10")->required();
    add_common(fig, fig_opts);

    std::string plot_in, plot_group, plot_values;
    CLI::App *plot = app.add_subcommand("plot", "aggregate a results CSV into plot data");
    plot->add_option("--in", plot_in, "input CSV")->required();
    plot->add_option("--group", plot_group, "comma-separated group columns")->required();
    plot->add_option("--values", plot_values, "comma-separated value columns")->required();
    plot->add_option("--out", plot_opts.out_path, "output path (stdout when omitted)");

    std::string dump_path;
    CLI::App *dump = app.add_subcommand("print-config", "print the effective config as JSON");
    dump->add_option("--config", dump_path, "JSON config file");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (est->parsed())
            return run_kind(est_opts, "estimate");
        if (crlb->parsed())
            return run_kind(crlb_opts, "crlb");
        if (pre->parsed())
            return run_kind(pre_opts, "precode");
        if (ota->parsed())
            return run_kind(ota_opts, "ota");
        if (fig->parsed())
        {
            const nflos::HarnessConfig cfg = resolve(fig_opts);
            const nflos::FigureRecipe recipe = nflos::figure_recipe(fig_name, cfg);
            std::ofstream file;
            if (!fig_opts.out_path.empty())
            {
                file.open(fig_opts.out_path);
                if (!file)
                {
                    std::cerr << "cannot open output file " << fig_opts.out_path << "\n";
                    return 1;
                }
            }
            std::ostream &out = fig_opts.out_path.empty() ? std::cout : file;
            nflos::run_figure(recipe, out);
            return 0;
        }
        if (plot->parsed())
        {
            std::ifstream in(plot_in);
            if (!in)
            {
                std::cerr << "cannot open " << plot_in << "\n";
                return 1;
            }
            const auto split = [](const std::string &s) {
                std::vector<std::string> out_v;
                std::stringstream ss(s);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    out_v.push_back(tok);
                return out_v;
            };
            std::ofstream file;
            if (!plot_opts.out_path.empty())
                file.open(plot_opts.out_path);
            std::ostream &out = plot_opts.out_path.empty() ? std::cout : file;
            nflos::emit_plotdata(in, split(plot_group), split(plot_values), out);
            return 0;
        }
        if (dump->parsed())
        {
            const nflos::HarnessConfig cfg =
                dump_path.empty() ? nflos::HarnessConfig{} : nflos::load_config(dump_path);
            std::cout << nflos::config_to_json(cfg) << "\n";
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
