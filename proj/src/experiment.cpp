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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nflos
{
    const char *kMetricsHeader =
        "trial,sweep,ue,mode,se_omega11,se_omega1m,se_gamma,"
        "crlb_omega11,crlb_omega1m,crlb_gamma,fb_omega11,fb_omega1m,fb_gamma,"
        "recon_rel_err,rmin_bps,rmean_bps,runtime_s";
    const char *kOtaTraceHeader = "trial,iter,r_min,r_mean,power,init_mode";

    namespace
    {
        constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

        double now_seconds()
        {
            return std::chrono::duration<double>(
                       std::chrono::steady_clock::now().time_since_epoch())
                .count();
        }

        std::string fmt(double v)
        {
            if (std::isnan(v))
                return "nan";
            std::ostringstream ss;
            ss.precision(12);
            ss << v;
            return ss.str();
        }

        struct MetricsRow
        {
            std::uint64_t trial = 0;
            double sweep = kNan;
            int ue = 0;
            std::string mode = "est";
            std::array<double, 3> se{kNan, kNan, kNan};
            std::array<double, 3> crlb{kNan, kNan, kNan};
            std::array<double, 3> fb{kNan, kNan, kNan};
            double recon_rel_err = kNan;
            double rmin = kNan;
            double rmean = kNan;
            double runtime_s = kNan;

            std::string to_csv() const
            {
                std::ostringstream ss;
                ss << trial << ',' << fmt(sweep) << ',' << ue << ',' << mode;
                for (double v : se)
                    ss << ',' << fmt(v);
                for (double v : crlb)
                    ss << ',' << fmt(v);
                for (double v : fb)
                    ss << ',' << fmt(v);
                ss << ',' << fmt(recon_rel_err) << ',' << fmt(rmin) << ',' << fmt(rmean)
                   << ',' << fmt(runtime_s);
                return ss.str();
            }
        };

        // Runs fn over all trials with a small worker pool; lines are emitted
        // in trial order regardless of completion order.
        void parallel_trials(int trials, int threads, bool skip_failures, std::ostream &out,
                             const std::function<std::vector<std::string>(int)> &fn)
        {
            std::vector<std::vector<std::string>> lines(static_cast<size_t>(trials));
            std::vector<std::string> errors(static_cast<size_t>(trials));
            std::atomic<int> next{0};
            const auto worker = [&]() {
                for (;;)
                {
                    const int t = next.fetch_add(1);
                    if (t >= trials)
                        return;
                    try
                    {
                        lines[static_cast<size_t>(t)] = fn(t);
                    }
                    catch (const std::exception &e)
                    {
                        errors[static_cast<size_t>(t)] = e.what();
                    }
                }
            };
            if (threads <= 1)
            {
                worker();
            }
            else
            {
                std::vector<std::thread> pool;
                for (int i = 0; i < threads; ++i)
                    pool.emplace_back(worker);
                for (auto &th : pool)
                    th.join();
            }
            for (int t = 0; t < trials; ++t)
            {
                if (!errors[static_cast<size_t>(t)].empty())
                {
                    const std::string msg = "trial " + std::to_string(t) + ": " + errors[static_cast<size_t>(t)];
                    if (!skip_failures)
                        throw std::runtime_error(msg);
                    std::cerr << "skipping failed " << msg << "\n";
                    continue;
                }
                for (const auto &l : lines[static_cast<size_t>(t)])
                    out << l << '\n';
            }
            out.flush();
        }

        struct SweepContext
        {
            HarnessConfig cfg;
            LinearArray bs;
            LinearArray ue;
            PilotConfig pilot;
            QuantizerSpec quant;
            std::shared_ptr<TripletEstimator> estimator;
        };

        SweepContext make_context(const HarnessConfig &cfg, bool with_estimator)
        {
            SweepContext ctx;
            ctx.cfg = cfg;
            ctx.bs = LinearArray::uniform_length(cfg.bs_antennas, cfg.bs_length);
            ctx.ue = LinearArray::uniform_spacing(cfg.ue_antennas, cfg.ue_spacing);
            ctx.pilot = make_pilot_config(cfg.bs_antennas, cfg.pilot_count,
                                          cfg.pilot_amplitude(cfg.pilot_count), cfg.pilot_tau);
            ctx.quant = QuantizerSpec::from_grid(cfg.grid.to_grid_spec(), cfg.quant_bits);
            if (with_estimator)
                ctx.estimator = std::make_shared<TripletEstimator>(
                    cfg.grid.to_policy(), ctx.pilot, ctx.bs, ctx.ue, cfg.wavelength, cfg.xi_form);
            return ctx;
        }

        DualState slice_duals(const DualState &in, const std::vector<std::vector<int>> &kept)
        {
            DualState out = in;
            out.t.clear();
            out.nu.clear();
            out.t.resize(kept.size());
            out.nu.resize(kept.size());
            for (size_t k = 0; k < kept.size(); ++k)
                for (int s : kept[k])
                {
                    out.t[k].push_back(in.t[k][static_cast<size_t>(s)]);
                    out.nu[k].push_back(in.nu[k][static_cast<size_t>(s)]);
                }
            return out;
        }

        PrecoderSet random_precoders(const std::vector<int> &counts, int m_dim, double p_bs,
                                     rng::Stream &rng)
        {
            PrecoderSet pre;
            pre.m.resize(counts.size());
            for (size_t k = 0; k < counts.size(); ++k)
            {
                pre.m[k].resize(static_cast<size_t>(counts[k]));
                for (auto &v : pre.m[k])
                {
                    v.resize(m_dim);
                    for (int i = 0; i < m_dim; ++i)
                        v[i] = rng.cnormal(1.0);
                }
            }
            const double power = pre.total_power();
            const double scale = std::sqrt(p_bs / power);
            for (auto &ue : pre.m)
                for (auto &v : ue)
                    v *= scale;
            return pre;
        }
    } // namespace

    Placement sample_placement(const PlacementRange &range, const LinearArray &bs,
                               const LinearArray &ue, const RoomModel &room, double mount_height,
                               rng::Stream &rng)
    {
        (void)mount_height;
        for (int attempt = 0; attempt < 1000; ++attempt)
        {
            Placement p;
            p.d = rng.uniform(range.d_min, range.d_max);
            p.beta = rng.uniform(-range.beta_max, range.beta_max);
            p.gamma = rng.uniform(range.gamma_min, range.gamma_max);
            try
            {
                const auto pts = ue_positions(p, bs, ue);
                bool inside = true;
                for (const auto &pt : pts)
                    inside = inside && pt.x > 0.0 && pt.x <= room.width && std::abs(pt.y) <= room.depth / 2.0;
                if (!inside)
                    continue;
                placement_to_triplet(p, bs, ue);
                return p;
            }
            catch (const std::exception &)
            {
                continue;
            }
        }
        throw std::runtime_error("sample_placement: no feasible pose found in 1000 draws");
    }

    Scenario build_scenario(const HarnessConfig &cfg, std::uint64_t trial)
    {
        Scenario sc;
        sc.wavelength = cfg.wavelength;
        sc.bs = LinearArray::uniform_length(cfg.bs_antennas, cfg.bs_length);
        sc.room = cfg.room;
        sc.p_bs_w = cfg.p_bs_w();
        sc.rho_pilot_w = cfg.rho_w();
        sc.noise_ue_w = cfg.noise_ue_w();
        sc.noise_bs_w = cfg.noise_bs_w();
        sc.seed = cfg.seed;
        sc.nlos_enabled = cfg.nlos_enabled;
        sc.mount_height = cfg.mount_height;
        const LinearArray ue_array = LinearArray::uniform_spacing(cfg.ue_antennas, cfg.ue_spacing);
        rng::Stream place_rng(cfg.seed, trial, rng::Purpose::placement);
        for (int k = 0; k < cfg.num_ues; ++k)
        {
            UeNode node;
            node.array = ue_array;
            node.place = cfg.fixed_placement
                             ? cfg.fixed_place
                             : sample_placement(cfg.place, sc.bs, ue_array, cfg.room, cfg.mount_height, place_rng);
            sc.ues.push_back(std::move(node));
        }
        return sc;
    }

    HarnessConfig apply_sweep(const HarnessConfig &cfg, double value)
    {
        HarnessConfig c = cfg;
        if (cfg.sweep_axis == "pilot_count")
            c.pilot_count = static_cast<int>(value);
        else if (cfg.sweep_axis == "quant_bits")
            c.quant_bits = static_cast<int>(value);
        else if (cfg.sweep_axis == "target_step_deg")
            c.grid.target_step = deg_to_rad(value);
        else if (cfg.sweep_axis == "array_length")
            c.bs_length = value;
        else if (cfg.sweep_axis == "ota_iterations")
            c.ota_iterations = static_cast<int>(value);
        else if (cfg.sweep_axis == "gamma_deg")
        {
            c.fixed_placement = true;
            c.fixed_place.gamma = deg_to_rad(value);
        }
        else if (cfg.sweep_axis == "none")
        {
        }
        else
            throw std::invalid_argument("unknown sweep axis: " + cfg.sweep_axis);
        c.validate();
        return c;
    }

    AngleTriplet dequantize_feasible(const QuantizedTriplet &fb, const QuantizerSpec &spec, double lbs_m)
    {
        AngleTriplet t = dequantize(fb, spec);
        const auto feasible = [&](const AngleTriplet &x) {
            try
            {
                return ref_distance_from_aods(x.omega11, x.omega1M, lbs_m) > 0.0;
            }
            catch (const std::domain_error &)
            {
                return false;
            }
        };
        if (feasible(t))
            return t;
        if (spec.bits <= 0)
            throw std::domain_error("dequantize_feasible: infeasible ideal feedback");
        // Step the omega1M code upward (the rays open) until the implied
        // reference distance turns positive again.
        QuantizedTriplet rep = fb;
        const std::uint32_t max_code = static_cast<std::uint32_t>(std::ldexp(1.0, spec.bits) - 1.0);
        for (std::uint32_t c = fb.codes[1]; c <= max_code; ++c)
        {
            rep.codes[1] = c;
            t = dequantize(rep, spec);
            if (feasible(t))
                return t;
        }
        for (std::uint32_t c = fb.codes[0]; c > 0; --c)
        {
            rep.codes[0] = c - 1;
            t = dequantize(rep, spec);
            if (feasible(t))
                return t;
        }
        throw std::domain_error("dequantize_feasible: no feasible repair");
    }

    AcquisitionResult acquire_csi(const Eigen::MatrixXcd &true_channel, const TripletEstimator &est,
                                  const PilotConfig &pilot_cfg, const QuantizerSpec &quant,
                                  const LinearArray &bs, const LinearArray &ue, double wavelength,
                                  double noise_var, rng::Stream &noise_rng,
                                  const AngleTriplet *hint)
    {
        AcquisitionResult out;
        const Measurement meas = transmit_pilots(true_channel, pilot_cfg, noise_var, noise_rng);
        out.estimate = est.estimate(meas, hint);
        out.residual = est.last_residual();
        out.fb = quantize(out.estimate, quant);
        out.dequantized = dequantize_feasible(out.fb, quant, bs.length());
        out.h_hat = reconstruct_los(out.dequantized, bs, ue, wavelength);
        return out;
    }

    namespace
    {
        void run_estimate_kind(const HarnessConfig &cfg, std::ostream &out, bool with_measurement)
        {
            out << kMetricsHeader << '\n';
            for (double v : cfg.sweep_values)
            {
                const HarnessConfig c = apply_sweep(cfg, v);
                const SweepContext ctx = make_context(c, with_measurement);
                parallel_trials(c.trials, c.threads, c.skip_failures, out, [&, v](int trial) {
                    const double t0 = now_seconds();
                    HarnessConfig single = ctx.cfg;
                    single.num_ues = 1;
                    const Scenario sc = build_scenario(single, static_cast<std::uint64_t>(trial));
                    const AngleTriplet truth = placement_to_triplet(sc.ues[0].place, sc.bs, sc.ues[0].array);

                    MetricsRow row;
                    row.trial = static_cast<std::uint64_t>(trial);
                    row.sweep = v;
                    row.mode = ctx.cfg.label.empty() ? (with_measurement ? "est" : "crlb") : ctx.cfg.label;

                    const std::complex<double> xi = clean_model_xi(ctx.pilot.amplitude, ctx.cfg.wavelength);
                    const double noise_eff = ctx.cfg.noise_ue_w() / ctx.pilot.tau;
                    const FisherMatrix fm = fisher_matrix(truth, xi, noise_eff, ctx.pilot,
                                                          sc.bs, sc.ues[0].array, ctx.cfg.wavelength);
                    const auto bounds = quantized_crlb(fm, ctx.quant);
                    row.crlb = {bounds[0], bounds[1], bounds[2]};

                    if (with_measurement)
                    {
                        const ChannelSet cs = generate_channels(sc);
                        rng::Stream noise_rng(ctx.cfg.seed, static_cast<std::uint64_t>(trial),
                                              rng::Purpose::pilot_noise);
                        const AcquisitionResult acq =
                            acquire_csi(cs.composite[0], *ctx.estimator, ctx.pilot, ctx.quant, sc.bs,
                                        sc.ues[0].array, ctx.cfg.wavelength, ctx.cfg.noise_ue_w(),
                                        noise_rng, &truth);
                        const AngleTriplet &d = acq.dequantized;
                        row.se = {(d.omega11 - truth.omega11) * (d.omega11 - truth.omega11),
                                  (d.omega1M - truth.omega1M) * (d.omega1M - truth.omega1M),
                                  (d.gamma - truth.gamma) * (d.gamma - truth.gamma)};
                        if (ctx.quant.bits > 0)
                            row.fb = {static_cast<double>(acq.fb.codes[0]),
                                      static_cast<double>(acq.fb.codes[1]),
                                      static_cast<double>(acq.fb.codes[2])};
                        row.recon_rel_err = (acq.h_hat - cs.los[0]).norm() / cs.los[0].norm();
                    }
                    row.runtime_s = now_seconds() - t0;
                    return std::vector<std::string>{row.to_csv()};
                });
            }
        }

        struct Stage1Result
        {
            PrecoderSet precoders;
            DualState duals;
            std::vector<std::vector<int>> kept;
        };

        Stage1Result stage1_pipeline(const std::vector<Eigen::MatrixXcd> &csi,
                                     const std::vector<double> &noise, const HarnessConfig &cfg)
        {
            const StreamAllocation alloc = allocate_streams(csi, cfg.alpha);
            const ScaResult sca = sca_maxmin_solve(csi, alloc, noise, cfg.p_bs_w(), cfg.sca);
            const RateReport hat = sinr_rate(csi, sca.precoders, sca.combiners, noise);
            const PruneResult pruned = prune_streams(hat, sca.precoders, cfg.p_bs_w(), cfg.prune_threshold,
                                                     cfg.sca.literal_scaling);
            Stage1Result out;
            out.precoders = pruned.precoders;
            out.duals = slice_duals(sca.duals, pruned.kept);
            out.kept = pruned.kept;
            return out;
        }

        void run_precode_kind(const HarnessConfig &cfg, std::ostream &out)
        {
            out << kMetricsHeader << '\n';
            for (double v : cfg.sweep_values)
            {
                const HarnessConfig c = apply_sweep(cfg, v);
                const SweepContext ctx = make_context(c, true);
                parallel_trials(c.trials, c.threads, c.skip_failures, out, [&, v](int trial) {
                    const Scenario sc = build_scenario(ctx.cfg, static_cast<std::uint64_t>(trial));
                    const ChannelSet cs = generate_channels(sc);
                    const std::vector<double> noise(sc.ues.size(), ctx.cfg.noise_ue_w());
                    const int pilot_len = ctx.cfg.ota_pilot_len > 0 ? ctx.cfg.ota_pilot_len : ctx.cfg.bs_antennas;

                    std::vector<std::string> lines;
                    for (const char *mode : {"est", "perfect"})
                    {
                        const double t0 = now_seconds();
                        std::vector<Eigen::MatrixXcd> csi;
                        double recon_err_acc = 0.0;
                        if (std::string(mode) == "est")
                        {
                            for (size_t k = 0; k < sc.ues.size(); ++k)
                            {
                                rng::Stream noise_rng(ctx.cfg.seed, static_cast<std::uint64_t>(trial),
                                                      rng::Purpose::pilot_noise, k);
                                const AngleTriplet truth =
                                    placement_to_triplet(sc.ues[k].place, sc.bs, sc.ues[k].array);
                                const AcquisitionResult acq = acquire_csi(
                                    cs.composite[k], *ctx.estimator, ctx.pilot, ctx.quant, sc.bs,
                                    sc.ues[k].array, ctx.cfg.wavelength, ctx.cfg.noise_ue_w(),
                                    noise_rng, &truth);
                                recon_err_acc += (acq.h_hat - cs.los[k]).norm() / cs.los[k].norm();
                                csi.push_back(acq.h_hat);
                            }
                        }
                        else
                        {
                            csi = cs.composite;
                        }
                        const Stage1Result st1 = stage1_pipeline(csi, noise, ctx.cfg);
                        AirInterface air(cs.composite, noise, ctx.cfg.noise_bs_w(), ctx.cfg.seed,
                                         static_cast<std::uint64_t>(trial));
                        const CombinerSet comb = ota_single_shot_combiners(air, st1.precoders, pilot_len);
                        const RateReport rep = air.evaluate(st1.precoders, comb);

                        MetricsRow row;
                        row.trial = static_cast<std::uint64_t>(trial);
                        row.sweep = v;
                        row.mode = ctx.cfg.label.empty() ? mode : ctx.cfg.label + ":" + mode;
                        row.rmin = rep.min_rate;
                        row.rmean = rep.mean_rate;
                        if (std::string(mode) == "est")
                            row.recon_rel_err = recon_err_acc / static_cast<double>(sc.ues.size());
                        row.runtime_s = now_seconds() - t0;
                        lines.push_back(row.to_csv());
                    }
                    return lines;
                });
            }
        }

        void run_ota_kind(const HarnessConfig &cfg, std::ostream &out)
        {
            out << kOtaTraceHeader << '\n';
            std::vector<std::string> modes;
            if (cfg.init_mode == "all")
                modes = {"los", "rank_guided", "random", "perfect"};
            else
                modes = {cfg.init_mode};

            for (double v : cfg.sweep_values)
            {
                const HarnessConfig c = apply_sweep(cfg, v);
                const bool needs_csi =
                    std::any_of(modes.begin(), modes.end(),
                                [](const std::string &m) { return m == "los" || m == "rank_guided"; });
                const SweepContext ctx = make_context(c, needs_csi);
                parallel_trials(c.trials, c.threads, c.skip_failures, out, [&](int trial) {
                    const Scenario sc = build_scenario(ctx.cfg, static_cast<std::uint64_t>(trial));
                    const ChannelSet cs = generate_channels(sc);
                    const std::vector<double> noise(sc.ues.size(), ctx.cfg.noise_ue_w());
                    const int pilot_len = ctx.cfg.ota_pilot_len > 0 ? ctx.cfg.ota_pilot_len : ctx.cfg.bs_antennas;
                    OtaConfig ota_cfg;
                    ota_cfg.pilot_len = pilot_len;
                    ota_cfg.ue_power_w = ctx.cfg.ue_power_w();
                    ota_cfg.iterations = ctx.cfg.ota_iterations;
                    ota_cfg.noise_bs_w = ctx.cfg.noise_bs_w();

                    std::vector<Eigen::MatrixXcd> csi_hat;
                    if (needs_csi)
                        for (size_t k = 0; k < sc.ues.size(); ++k)
                        {
                            rng::Stream noise_rng(ctx.cfg.seed, static_cast<std::uint64_t>(trial),
                                                  rng::Purpose::pilot_noise, k);
                            const AngleTriplet truth =
                                placement_to_triplet(sc.ues[k].place, sc.bs, sc.ues[k].array);
                            csi_hat.push_back(acquire_csi(cs.composite[k], *ctx.estimator, ctx.pilot,
                                                          ctx.quant, sc.bs, sc.ues[k].array,
                                                          ctx.cfg.wavelength, ctx.cfg.noise_ue_w(),
                                                          noise_rng, &truth)
                                                  .h_hat);
                        }

                    std::vector<std::string> lines;
                    for (const std::string &mode : modes)
                    {
                        AirInterface air(cs.composite, noise, ctx.cfg.noise_bs_w(), ctx.cfg.seed,
                                         static_cast<std::uint64_t>(trial));
                        if (mode == "perfect")
                        {
                            const Stage1Result st1 = stage1_pipeline(cs.composite, noise, ctx.cfg);
                            const RateReport rep = sinr_rate(
                                cs.composite, st1.precoders,
                                mmse_combiners(cs.composite, st1.precoders, noise), noise);
                            std::ostringstream ss;
                            ss << trial << ",0," << fmt(rep.min_rate) << ',' << fmt(rep.mean_rate) << ','
                               << fmt(st1.precoders.total_power()) << ",perfect";
                            lines.push_back(ss.str());
                            continue;
                        }
                        PrecoderSet init;
                        DualState duals;
                        if (mode == "los")
                        {
                            const Stage1Result st1 = stage1_pipeline(csi_hat, noise, ctx.cfg);
                            init = st1.precoders;
                            duals = st1.duals;
                        }
                        else if (mode == "rank_guided")
                        {
                            const StreamAllocation alloc = allocate_streams(csi_hat, ctx.cfg.alpha);
                            rng::Stream init_rng(ctx.cfg.seed, static_cast<std::uint64_t>(trial),
                                                 rng::Purpose::precoder_init, 1);
                            init = random_precoders(alloc.counts, ctx.cfg.bs_antennas,
                                                    ctx.cfg.p_bs_w(), init_rng);
                        }
                        else if (mode == "random")
                        {
                            std::vector<int> counts(sc.ues.size(), ctx.cfg.ue_antennas);
                            rng::Stream init_rng(ctx.cfg.seed, static_cast<std::uint64_t>(trial),
                                                 rng::Purpose::precoder_init, 2);
                            init = random_precoders(counts, ctx.cfg.bs_antennas, ctx.cfg.p_bs_w(), init_rng);
                        }
                        else
                        {
                            throw std::invalid_argument("run_ota: unknown init mode " + mode);
                        }
                        const OtaResult res = ota_refine(init, air, ota_cfg, duals, ctx.cfg.sca);
                        for (const auto &tr : res.trace)
                        {
                            std::ostringstream ss;
                            ss << trial << ',' << tr.iteration << ',' << fmt(tr.r_min) << ','
                               << fmt(tr.r_mean) << ',' << fmt(tr.power) << ',' << mode;
                            lines.push_back(ss.str());
                        }
                    }
                    return lines;
                });
            }
        }

        // Likelihood surface over (omega1M, gamma) with omega11 held at its
        // estimate, for one placement.
        void run_surface_kind(const HarnessConfig &cfg, std::ostream &out)
        {
            out << "pilot_count,omega1m_deg,gamma_deg,residual\n";
            for (double v : cfg.sweep_values)
            {
                const HarnessConfig c = apply_sweep(cfg, v);
                const SweepContext ctx = make_context(c, true);
                HarnessConfig single = ctx.cfg;
                single.num_ues = 1;
                const Scenario sc = build_scenario(single, 0);
                const ChannelSet cs = generate_channels(sc);
                rng::Stream noise_rng(ctx.cfg.seed, 0, rng::Purpose::pilot_noise);
                const Measurement meas =
                    transmit_pilots(cs.composite[0], ctx.pilot, ctx.cfg.noise_ue_w(), noise_rng);
                const AngleTriplet truth = placement_to_triplet(sc.ues[0].place, sc.bs, sc.ues[0].array);
                const AngleTriplet est = ctx.estimator->estimate(meas, &truth);

                const double span = deg_to_rad(12.0);
                const int steps = 160;
                for (int i = 0; i <= steps; ++i)
                    for (int j = 0; j <= steps; ++j)
                    {
                        const double w1m = est.omega1M - span / 2 + span * i / steps;
                        const double g = std::clamp(est.gamma - span / 2 + span * j / steps,
                                                    ctx.cfg.grid.gamma_min, ctx.cfg.grid.gamma_max);
                        double res = kNan;
                        try
                        {
                            const ModelResponse mr = model_response({est.omega11, w1m, g}, ctx.pilot,
                                                                    sc.bs, sc.ues[0].array, ctx.cfg.wavelength);
                            res = model_residual(meas.stacked, mr, ctx.cfg.xi_form);
                        }
                        catch (const std::domain_error &)
                        {
                        }
                        out << static_cast<int>(v) << ',' << fmt(rad_to_deg(w1m)) << ','
                            << fmt(rad_to_deg(g)) << ',' << fmt(res) << '\n';
                    }
            }
        }
    } // namespace

    void run_experiment(const HarnessConfig &cfg, const std::string &kind, std::ostream &out)
    {
        cfg.validate();
        if (kind == "estimate")
            run_estimate_kind(cfg, out, true);
        else if (kind == "crlb")
            run_estimate_kind(cfg, out, false);
        else if (kind == "precode")
            run_precode_kind(cfg, out);
        else if (kind == "ota")
            run_ota_kind(cfg, out);
        else if (kind == "surface")
            run_surface_kind(cfg, out);
        else
            throw std::invalid_argument("run_experiment: unknown kind " + kind);
    }

    void emit_plotdata(std::istream &csv, const std::vector<std::string> &group_cols,
                       const std::vector<std::string> &value_cols, std::ostream &out)
    {
        std::string header;
        if (!std::getline(csv, header))
            throw std::runtime_error("emit_plotdata: empty input");
        std::vector<std::string> cols;
        {
            std::stringstream ss(header);
            std::string tok;
            while (std::getline(ss, tok, ','))
                cols.push_back(tok);
        }
        const auto col_index = [&](const std::string &name) {
            const auto it = std::find(cols.begin(), cols.end(), name);
            if (it == cols.end())
                throw std::runtime_error("emit_plotdata: missing column " + name);
            return static_cast<size_t>(it - cols.begin());
        };
        std::vector<size_t> gidx, vidx;
        for (const auto &g : group_cols)
            gidx.push_back(col_index(g));
        for (const auto &vc : value_cols)
            vidx.push_back(col_index(vc));

        for (size_t i = 0; i < group_cols.size(); ++i)
            out << (i ? "," : "") << group_cols[i];
        for (const auto &vc : value_cols)
            out << ',' << vc << "_mean," << vc << "_p10," << vc << "_p50," << vc << "_p90";
        out << '\n';

        std::vector<std::string> order;
        std::map<std::string, std::vector<std::vector<double>>> groups;
        std::string line;
        while (std::getline(csv, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string tok;
            while (std::getline(ss, tok, ','))
                fields.push_back(tok);
            std::string key;
            for (size_t i = 0; i < gidx.size(); ++i)
                key += (i ? "," : "") + fields.at(gidx[i]);
            auto it = groups.find(key);
            if (it == groups.end())
            {
                it = groups.emplace(key, std::vector<std::vector<double>>(vidx.size())).first;
                order.push_back(key);
            }
            for (size_t i = 0; i < vidx.size(); ++i)
            {
                const double val = std::strtod(fields.at(vidx[i]).c_str(), nullptr);
                if (!std::isnan(val))
                    it->second[i].push_back(val);
            }
        }
        const auto pct = [](std::vector<double> &v, double p) {
            if (v.empty())
                return kNan;
            const size_t idx = static_cast<size_t>(std::clamp(
                p * static_cast<double>(v.size() - 1), 0.0, static_cast<double>(v.size() - 1)));
            std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
            return v[idx];
        };
        for (const auto &key : order)
        {
            out << key;
            for (auto &vals : groups[key])
            {
                double mean = kNan;
                if (!vals.empty())
                {
                    mean = 0.0;
                    for (double x : vals)
                        mean += x;
                    mean /= static_cast<double>(vals.size());
                }
                std::vector<double> tmp = vals;
                out << ',' << fmt(mean) << ',' << fmt(pct(tmp, 0.1)) << ',' << fmt(pct(tmp, 0.5))
                    << ',' << fmt(pct(tmp, 0.9));
            }
            out << '\n';
        }
    }

} // namespace nflos
