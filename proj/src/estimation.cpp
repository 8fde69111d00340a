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

#include "nflos/estimation.hpp"

#include "nflos/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nflos
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();

        // Residual of the LS-fitted scalar without allocations:
        // ||y||^2 - |h^H D y|^2 / sum(d^-2). Returns +inf for an infeasible
        // triplet. Shares its argmin with both xi forms.
        double residual_fast(const Eigen::VectorXcd &y, const AngleTriplet &t,
                             const PilotConfig &cfg, const LinearArray &bs,
                             const LinearArray &ue, double wavelength, double y_norm_sq)
        {
            double d11;
            try
            {
                d11 = ref_distance_from_aods(t.omega11, t.omega1M, bs.length());
            }
            catch (const std::domain_error &)
            {
                return kInf;
            }
            if (!(d11 > 0.0) || !std::isfinite(d11))
                return kInf;
            const double sin_w = std::sin(t.omega11);
            const double sin_wg = std::sin(t.omega11 + t.gamma);
            const double cos_g = std::cos(t.gamma);
            const double two_pi_over_lambda = 2.0 * M_PI / wavelength;
            double c_re = 0.0, c_im = 0.0, s = 0.0;
            int idx = 0;
            for (int m : cfg.active_set)
            {
                const double lb = bs.spacings[static_cast<size_t>(m)];
                for (size_t n = 0; n < ue.spacings.size(); ++n, ++idx)
                {
                    const double lu = ue.spacings[n];
                    const double rad = d11 * d11 + 2.0 * d11 * (lb * sin_w - lu * sin_wg) -
                                       2.0 * lb * lu * cos_g + lb * lb + lu * lu;
                    if (rad <= 0.0)
                        return kInf;
                    const double d = std::sqrt(rad);
                    const double inv = 1.0 / d;
                    // conj(h) = exp(+j 2 pi d / lambda)
                    const double ph = two_pi_over_lambda * d;
                    const double hr = std::cos(ph), hi = std::sin(ph);
                    const std::complex<double> yv = y[idx];
                    c_re += inv * (hr * yv.real() - hi * yv.imag());
                    c_im += inv * (hr * yv.imag() + hi * yv.real());
                    s += inv * inv;
                }
            }
            if (s <= 0.0)
                return kInf;
            const double r = y_norm_sq - (c_re * c_re + c_im * c_im) / s;
            return r > 0.0 ? r : 0.0;
        }
    } // namespace

    void PilotConfig::validate(int num_bs_antennas) const
    {
        if (num_active() < 2)
            throw std::invalid_argument("PilotConfig: need at least two active antennas");
        if (active_set.front() != 0 || active_set.back() != num_bs_antennas - 1)
            throw std::invalid_argument("PilotConfig: active set must include both outermost antennas");
        for (size_t i = 1; i < active_set.size(); ++i)
            if (active_set[i] <= active_set[i - 1])
                throw std::invalid_argument("PilotConfig: active indices must be strictly increasing");
        if (tau < num_active())
            throw std::invalid_argument("PilotConfig: tau must be at least |active|");
        if (pilots.rows() != num_active() || pilots.cols() != tau)
            throw std::invalid_argument("PilotConfig: pilot matrix has the wrong shape");
        const Eigen::MatrixXcd gram = pilots * pilots.adjoint();
        const double err = (gram - static_cast<double>(tau) * Eigen::MatrixXcd::Identity(num_active(), num_active())).norm();
        if (err > 1e-10 * tau)
            throw std::invalid_argument("PilotConfig: pilot rows are not orthogonal");
        if (!(amplitude > 0.0))
            throw std::invalid_argument("PilotConfig: amplitude must be positive");
    }

    PilotConfig make_pilot_config(int num_bs, int n_active, double amplitude, int tau)
    {
        if (num_bs < 2 || n_active < 2 || n_active > num_bs)
            throw std::invalid_argument("make_pilot_config: need 2 <= n_active <= M");
        PilotConfig cfg;
        cfg.active_set.resize(static_cast<size_t>(n_active));
        for (int i = 0; i < n_active; ++i)
            cfg.active_set[static_cast<size_t>(i)] =
                static_cast<int>(std::lround(static_cast<double>(i) * (num_bs - 1) / (n_active - 1)));
        for (size_t i = 1; i < cfg.active_set.size(); ++i)
            if (cfg.active_set[i] <= cfg.active_set[i - 1])
                cfg.active_set[i] = cfg.active_set[i - 1] + 1;
        cfg.tau = tau > 0 ? tau : std::max(4, n_active);
        cfg.amplitude = amplitude;
        cfg.pilots.resize(n_active, cfg.tau);
        for (int i = 0; i < n_active; ++i)
            for (int t = 0; t < cfg.tau; ++t)
                cfg.pilots(i, t) = std::polar(1.0, -2.0 * M_PI * i * t / cfg.tau);
        cfg.validate(num_bs);
        return cfg;
    }

    Measurement transmit_pilots(const Eigen::MatrixXcd &channel, const PilotConfig &cfg,
                                double noise_var, rng::Stream &rng)
    {
        const int n_rx = static_cast<int>(channel.rows());
        Eigen::MatrixXcd active(n_rx, cfg.num_active());
        for (int i = 0; i < cfg.num_active(); ++i)
            active.col(i) = channel.col(cfg.active_set[static_cast<size_t>(i)]);

        Measurement meas;
        meas.raw = cfg.amplitude * active * cfg.pilots;
        if (noise_var > 0.0)
            for (Eigen::Index t = 0; t < meas.raw.cols(); ++t)
                for (Eigen::Index n = 0; n < meas.raw.rows(); ++n)
                    meas.raw(n, t) += rng.cnormal(noise_var);
        meas.correlated = meas.raw * cfg.pilots.adjoint() / static_cast<double>(cfg.tau);
        meas.stacked = Eigen::Map<const Eigen::VectorXcd>(meas.correlated.data(), meas.correlated.size());
        meas.noise_var_eff = noise_var / static_cast<double>(cfg.tau);
        return meas;
    }

    ModelResponse model_response(const AngleTriplet &t, const PilotConfig &cfg,
                                 const LinearArray &bs, const LinearArray &ue, double wavelength)
    {
        const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, bs.length());
        if (!(d11 > 0.0) || !std::isfinite(d11))
            throw std::domain_error("model_response: infeasible triplet");
        const int n_ue = ue.size();
        ModelResponse mr;
        mr.n_ue = n_ue;
        mr.inv_dist.resize(static_cast<Eigen::Index>(cfg.num_active()) * n_ue);
        mr.phase.resize(mr.inv_dist.size());
        Eigen::Index idx = 0;
        for (int m : cfg.active_set)
        {
            const double lb = bs.spacings[static_cast<size_t>(m)];
            for (int n = 0; n < n_ue; ++n, ++idx)
            {
                const double d = pair_distance(t, d11, lb, ue.spacings[static_cast<size_t>(n)]);
                mr.inv_dist[idx] = 1.0 / d;
                mr.phase[idx] = std::polar(1.0, -2.0 * M_PI * d / wavelength);
            }
        }
        return mr;
    }

    std::complex<double> fit_xi(const Eigen::VectorXcd &y, const ModelResponse &mr, XiForm form)
    {
        const double den = mr.inv_dist.squaredNorm();
        if (!(den > 0.0))
            throw std::domain_error("fit_xi: degenerate response (||D h|| = 0)");
        std::complex<double> num = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            num += std::conj(mr.phase[i]) * mr.inv_dist[i] * y[i];
        if (form == XiForm::paper_literal)
            return num / (den * static_cast<double>(mr.n_ue));
        return num / den;
    }

    double model_residual(const Eigen::VectorXcd &y, const ModelResponse &mr, XiForm form)
    {
        const std::complex<double> xi = fit_xi(y, mr, form);
        double r = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            r += std::norm(y[i] - xi * mr.inv_dist[i] * mr.phase[i]);
        return r;
    }

    AngleTriplet ml_estimate(const Measurement &meas, const AngularGrid &grid, const PilotConfig &cfg,
                             const LinearArray &bs, const LinearArray &ue, double wavelength, XiForm form)
    {
        if (grid.points.empty())
            throw std::invalid_argument("ml_estimate: empty grid");
        (void)form; // both forms share the argmin; see fit_xi
        const double y_norm_sq = meas.stacked.squaredNorm();
        double best = kInf;
        size_t best_idx = 0;
        for (size_t i = 0; i < grid.points.size(); ++i)
        {
            const double r = residual_fast(meas.stacked, grid.points[i], cfg, bs, ue, wavelength, y_norm_sq);
            if (r < best)
            {
                best = r;
                best_idx = i;
            }
        }
        return grid.points[best_idx];
    }

    double QuantizerSpec::step(int i) const
    {
        if (bits <= 0)
            return 0.0;
        const double levels = std::ldexp(1.0, bits) - 1.0; // 2^q - 1 intervals
        return (hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)]) / levels;
    }

    QuantizerSpec QuantizerSpec::from_grid(const GridSpec &spec, int bits)
    {
        QuantizerSpec q;
        q.bits = bits;
        q.lo = {spec.omega_min, spec.omega_min, spec.gamma_min};
        q.hi = {spec.omega_max, spec.omega_max, spec.gamma_max};
        return q;
    }

    QuantizedTriplet quantize(const AngleTriplet &t, const QuantizerSpec &spec)
    {
        QuantizedTriplet out;
        const std::array<double, 3> vals{t.omega11, t.omega1M, t.gamma};
        for (int i = 0; i < 3; ++i)
        {
            const size_t si = static_cast<size_t>(i);
            if (spec.bits <= 0)
            {
                out.exact[si] = vals[si];
                continue;
            }
            if (!(spec.lo[si] < spec.hi[si]))
                throw std::invalid_argument("quantize: invalid range");
            const double v = vals[si];
            if (v < spec.lo[si] || v > spec.hi[si])
                ++out.clamped;
            const double d = spec.step(i);
            const double max_code = std::ldexp(1.0, spec.bits) - 1.0;
            double code = std::round((v - spec.lo[si]) / d);
            code = std::clamp(code, 0.0, max_code);
            out.codes[si] = static_cast<std::uint32_t>(code);
        }
        return out;
    }

    AngleTriplet dequantize(const QuantizedTriplet &q, const QuantizerSpec &spec)
    {
        if (spec.bits <= 0)
            return {q.exact[0], q.exact[1], q.exact[2]};
        AngleTriplet t;
        t.omega11 = spec.lo[0] + q.codes[0] * spec.step(0);
        t.omega1M = spec.lo[1] + q.codes[1] * spec.step(1);
        t.gamma = spec.lo[2] + q.codes[2] * spec.step(2);
        return t;
    }

    Eigen::MatrixXcd reconstruct_los(const AngleTriplet &t, const LinearArray &bs,
                                     const LinearArray &ue, double wavelength)
    {
        try
        {
            return los_channel(pair_geometry(t, bs, ue), wavelength);
        }
        catch (const std::domain_error &e)
        {
            throw std::domain_error(std::string("reconstruct_los: infeasible feedback: ") + e.what());
        }
    }

    // ---------------------------------------------------------------- search

    MlGridSearch::MlGridSearch(const AngularGrid &grid, const PilotConfig &cfg, const LinearArray &bs,
                               const LinearArray &ue, double wavelength, std::size_t cache_limit_bytes)
        : grid_(std::make_shared<AngularGrid>(grid)), cfg_(cfg), bs_(bs), ue_(ue), wavelength_(wavelength)
    {
        pairs_ = cfg.num_active() * ue.size();
        const std::size_t bytes = grid.points.size() * (static_cast<std::size_t>(pairs_) * 8 + 4);
        if (bytes > cache_limit_bytes)
            return; // streaming mode
        pack_.resize(grid.points.size() * static_cast<std::size_t>(pairs_) * 2);
        norm_.resize(grid.points.size());
        const double two_pi_over_lambda = 2.0 * M_PI / wavelength_;
        for (size_t p = 0; p < grid.points.size(); ++p)
        {
            const AngleTriplet &t = grid.points[p];
            float *dst = pack_.data() + p * static_cast<std::size_t>(pairs_) * 2;
            double d11 = -1.0;
            try
            {
                d11 = ref_distance_from_aods(t.omega11, t.omega1M, bs_.length());
            }
            catch (const std::domain_error &)
            {
            }
            bool ok = d11 > 0.0 && std::isfinite(d11);
            double s = 0.0;
            if (ok)
            {
                const double sin_w = std::sin(t.omega11);
                const double sin_wg = std::sin(t.omega11 + t.gamma);
                const double cos_g = std::cos(t.gamma);
                int i = 0;
                for (int m : cfg_.active_set)
                {
                    const double lb = bs_.spacings[static_cast<size_t>(m)];
                    for (size_t n = 0; n < ue_.spacings.size() && ok; ++n, ++i)
                    {
                        const double lu = ue_.spacings[n];
                        const double rad = d11 * d11 + 2.0 * d11 * (lb * sin_w - lu * sin_wg) -
                                           2.0 * lb * lu * cos_g + lb * lb + lu * lu;
                        if (rad <= 0.0)
                        {
                            ok = false;
                            break;
                        }
                        const double d = std::sqrt(rad);
                        const double inv = 1.0 / d;
                        const double ph = two_pi_over_lambda * d;
                        dst[2 * i] = static_cast<float>(inv * std::cos(ph));
                        dst[2 * i + 1] = static_cast<float>(inv * std::sin(ph));
                        s += inv * inv;
                    }
                    if (!ok)
                        break;
                }
            }
            if (!ok)
            {
                std::fill(dst, dst + static_cast<std::size_t>(pairs_) * 2, 0.0f);
                norm_[p] = -1.0f;
                skip_.push_back(static_cast<std::uint32_t>(p));
            }
            else
            {
                norm_[p] = static_cast<float>(s);
            }
        }
    }

    MlGridSearch::Hit MlGridSearch::best(const Eigen::VectorXcd &y) const
    {
        auto hits = top(y, 1);
        return hits.front();
    }

    std::vector<MlGridSearch::Hit> MlGridSearch::top(const Eigen::VectorXcd &y, int r,
                                                     std::array<double, 3> min_sep) const
    {
        if (r < 1)
            throw std::invalid_argument("MlGridSearch::top: r must be >= 1");
        const size_t n_points = grid_->points.size();
        std::vector<Hit> heap; // sorted ascending by (residual, index)
        heap.reserve(static_cast<size_t>(r) + 1);
        const bool use_sep = min_sep[0] > 0.0 || min_sep[1] > 0.0 || min_sep[2] > 0.0;
        const auto near = [&](size_t a, size_t b) {
            const AngleTriplet &ta = grid_->points[a];
            const AngleTriplet &tb = grid_->points[b];
            return std::abs(ta.omega11 - tb.omega11) <= min_sep[0] &&
                   std::abs(ta.omega1M - tb.omega1M) <= min_sep[1] &&
                   std::abs(ta.gamma - tb.gamma) <= min_sep[2];
        };
        const auto offer = [&](double res, size_t idx) {
            if (heap.size() == static_cast<size_t>(r) && res >= heap.back().residual)
                return;
            Hit h{idx, res};
            if (use_sep)
            {
                for (size_t i = 0; i < heap.size(); ++i)
                    if (near(heap[i].index, idx))
                    {
                        // same basin: keep only the better of the two
                        if (heap[i].residual <= res)
                            return;
                        heap.erase(heap.begin() + static_cast<std::ptrdiff_t>(i));
                        break;
                    }
            }
            auto pos = std::upper_bound(heap.begin(), heap.end(), h, [](const Hit &a, const Hit &b) {
                return a.residual < b.residual || (a.residual == b.residual && a.index < b.index);
            });
            heap.insert(pos, h);
            if (heap.size() > static_cast<size_t>(r))
                heap.pop_back();
        };
        const double y_norm_sq = y.squaredNorm();
        if (!pack_.empty())
        {
            if (y.size() != pairs_)
                throw std::invalid_argument("MlGridSearch: measurement size mismatch");
            std::vector<double> yr(static_cast<size_t>(pairs_)), yi(static_cast<size_t>(pairs_));
            for (int i = 0; i < pairs_; ++i)
            {
                yr[static_cast<size_t>(i)] = y[i].real();
                yi[static_cast<size_t>(i)] = y[i].imag();
            }
            const float *pk = pack_.data();
            for (size_t p = 0; p < n_points; ++p, pk += static_cast<std::size_t>(pairs_) * 2)
            {
                const float s = norm_[p];
                if (s <= 0.0f)
                    continue;
                double c_re = 0.0, c_im = 0.0;
                for (int i = 0; i < pairs_; ++i)
                {
                    const double vr = pk[2 * i], vi = pk[2 * i + 1];
                    c_re += vr * yr[static_cast<size_t>(i)] - vi * yi[static_cast<size_t>(i)];
                    c_im += vr * yi[static_cast<size_t>(i)] + vi * yr[static_cast<size_t>(i)];
                }
                const double res = y_norm_sq - (c_re * c_re + c_im * c_im) / static_cast<double>(s);
                offer(res > 0.0 ? res : 0.0, p);
            }
        }
        else
        {
            for (size_t p = 0; p < n_points; ++p)
                offer(residual_fast(y, grid_->points[p], cfg_, bs_, ue_, wavelength_, y_norm_sq), p);
        }
        if (heap.empty())
            throw std::runtime_error("MlGridSearch: no feasible grid point");
        return heap;
    }

    // ------------------------------------------------------ TripletEstimator

    // Stage-A cache: the model restricted to the first UE antenna row, whose
    // distances d_{1,m} depend on the AoD pair only. Stored as packed floats
    // (inverse distance times conjugate phase) per feasible (omega11, omega1M).
    struct TripletEstimator::PairScan
    {
        struct Node
        {
            double w11, w1m;
        };
        std::vector<Node> points;
        std::vector<float> pack; // n_active * (re, im) per point
        std::vector<float> norm; // sum d^-2 per point
        int n_active = 0;

        PairScan(const SearchPolicy &pol, const PilotConfig &cfg, const LinearArray &bs,
                 double wavelength, double w_lo, double w_hi)
            : n_active(cfg.num_active())
        {
            if (n_active > 16)
                throw std::invalid_argument("PairScan: more than 16 active antennas");
            const int count = std::max(2, static_cast<int>(std::lround((w_hi - w_lo) / pol.pair_step)));
            const auto samples = axis_samples(w_lo, w_hi, count);
            const double two_pi_over_lambda = 2.0 * M_PI / wavelength;
            points.reserve(samples.size() * samples.size() / 2);
            for (double w11 : samples)
                for (double w1m : samples)
                {
                    double d11;
                    try
                    {
                        d11 = ref_distance_from_aods(w11, w1m, bs.length());
                    }
                    catch (const std::domain_error &)
                    {
                        continue;
                    }
                    if (!(d11 > 0.0) || !std::isfinite(d11))
                        continue;
                    const double sin_w = std::sin(w11);
                    double s = 0.0;
                    std::array<float, 32> tmp{};
                    bool ok = true;
                    for (int i = 0; i < n_active && ok; ++i)
                    {
                        const double lb = bs.spacings[static_cast<size_t>(cfg.active_set[static_cast<size_t>(i)])];
                        const double rad = d11 * d11 + 2.0 * d11 * lb * sin_w + lb * lb;
                        if (rad <= 0.0)
                        {
                            ok = false;
                            break;
                        }
                        const double d = std::sqrt(rad);
                        const double inv = 1.0 / d;
                        const double ph = two_pi_over_lambda * d;
                        tmp[static_cast<size_t>(2 * i)] = static_cast<float>(inv * std::cos(ph));
                        tmp[static_cast<size_t>(2 * i + 1)] = static_cast<float>(inv * std::sin(ph));
                        s += inv * inv;
                    }
                    if (!ok)
                        continue;
                    points.push_back({w11, w1m});
                    pack.insert(pack.end(), tmp.begin(), tmp.begin() + 2 * n_active);
                    norm.push_back(static_cast<float>(s));
                }
            if (points.empty())
                throw std::runtime_error("TripletEstimator: empty AoD pair grid");
        }

        // Top-r basin-separated candidates for the reference-row measurement.
        std::vector<Node> top(const Eigen::VectorXcd &y_row, int r, double sep) const
        {
            struct Hit
            {
                double res;
                size_t idx;
            };
            std::vector<Hit> kept;
            kept.reserve(static_cast<size_t>(r) + 1);
            std::array<double, 16> yr{}, yi{};
            for (int i = 0; i < n_active; ++i)
            {
                yr[static_cast<size_t>(i)] = y_row[i].real();
                yi[static_cast<size_t>(i)] = y_row[i].imag();
            }
            const double y_norm_sq = y_row.squaredNorm();
            const float *pk = pack.data();
            for (size_t p = 0; p < points.size(); ++p, pk += 2 * n_active)
            {
                double c_re = 0.0, c_im = 0.0;
                for (int i = 0; i < n_active; ++i)
                {
                    const double vr = pk[2 * i], vi = pk[2 * i + 1];
                    c_re += vr * yr[static_cast<size_t>(i)] - vi * yi[static_cast<size_t>(i)];
                    c_im += vr * yi[static_cast<size_t>(i)] + vi * yr[static_cast<size_t>(i)];
                }
                const double res = y_norm_sq - (c_re * c_re + c_im * c_im) / static_cast<double>(norm[p]);
                if (kept.size() == static_cast<size_t>(r) && res >= kept.back().res)
                    continue;
                bool suppressed = false;
                for (size_t i = 0; i < kept.size(); ++i)
                {
                    if (std::abs(points[kept[i].idx].w11 - points[p].w11) <= sep &&
                        std::abs(points[kept[i].idx].w1m - points[p].w1m) <= sep)
                    {
                        if (kept[i].res <= res)
                            suppressed = true;
                        else
                            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
                        break;
                    }
                }
                if (suppressed)
                    continue;
                const Hit h{res, p};
                auto pos = std::upper_bound(kept.begin(), kept.end(), h, [](const Hit &a, const Hit &b) {
                    return a.res < b.res || (a.res == b.res && a.idx < b.idx);
                });
                kept.insert(pos, h);
                if (kept.size() > static_cast<size_t>(r))
                    kept.pop_back();
            }
            std::vector<Node> out;
            out.reserve(kept.size());
            for (const auto &h : kept)
                out.push_back(points[h.idx]);
            return out;
        }
    };

    TripletEstimator::TripletEstimator(SearchPolicy policy, PilotConfig cfg, LinearArray bs,
                                       LinearArray ue, double wavelength, XiForm form)
        : policy_(policy), cfg_(std::move(cfg)), bs_(std::move(bs)), ue_(std::move(ue)),
          wavelength_(wavelength), form_(form)
    {
        if (!(policy_.omega_min < policy_.omega_max) || !(policy_.gamma_min < policy_.gamma_max))
            throw std::invalid_argument("TripletEstimator: invalid search bounds");
        if (policy_.window <= 0.0)
            pair_scan_ = std::make_unique<PairScan>(policy_, cfg_, bs_, wavelength_,
                                                    policy_.omega_min, policy_.omega_max);
    }

    TripletEstimator::~TripletEstimator() = default;
    TripletEstimator::TripletEstimator(TripletEstimator &&) noexcept = default;
    TripletEstimator &TripletEstimator::operator=(TripletEstimator &&) noexcept = default;

    AngleTriplet TripletEstimator::zoom(const Eigen::VectorXcd &y, const AngleTriplet &start,
                                        std::array<double, 3> step,
                                        std::array<std::pair<double, double>, 3> bounds,
                                        double &residual) const
    {
        const double y_norm_sq = y.squaredNorm();
        AngleTriplet cur = start;
        const int n_samp = policy_.zoom_samples;
        // Pattern-search schedule: scan a box of zoom_cells * step around the
        // current point; while the minimizer lands on the box edge, recenter
        // without shrinking (follows diagonal ridges), otherwise shrink.
        const int budget = 5 * policy_.max_zoom_levels;
        int recenters = 0;
        for (int iter = 0; iter < budget; ++iter)
        {
            if (step[0] <= policy_.target_step && step[1] <= policy_.target_step &&
                step[2] <= policy_.target_step)
                break;
            std::array<std::vector<double>, 3> axes;
            const std::array<double, 3> center{cur.omega11, cur.omega1M, cur.gamma};
            std::array<double, 3> next_step{};
            for (int a = 0; a < 3; ++a)
            {
                const size_t sa = static_cast<size_t>(a);
                double w = policy_.zoom_cells * step[sa];
                double lo = center[sa] - w / 2.0, hi = center[sa] + w / 2.0;
                if (lo < bounds[sa].first)
                {
                    hi += bounds[sa].first - lo;
                    lo = bounds[sa].first;
                }
                if (hi > bounds[sa].second)
                {
                    lo -= hi - bounds[sa].second;
                    hi = bounds[sa].second;
                }
                lo = std::max(lo, bounds[sa].first);
                hi = std::min(hi, bounds[sa].second);
                axes[sa] = axis_samples(lo, hi, n_samp);
                next_step[sa] = (hi - lo) / n_samp;
            }
            double best = residual_fast(y, cur, cfg_, bs_, ue_, wavelength_, y_norm_sq);
            AngleTriplet best_t = cur;
            for (double w11 : axes[0])
                for (double w1m : axes[1])
                    for (double g : axes[2])
                    {
                        const AngleTriplet t{w11, w1m, g};
                        const double r = residual_fast(y, t, cfg_, bs_, ue_, wavelength_, y_norm_sq);
                        if (r < best)
                        {
                            best = r;
                            best_t = t;
                        }
                    }
            residual = best;
            const bool moved = best_t.omega11 != cur.omega11 || best_t.omega1M != cur.omega1M ||
                               best_t.gamma != cur.gamma;
            const std::array<double, 3> best_v{best_t.omega11, best_t.omega1M, best_t.gamma};
            bool on_edge = false;
            for (int a = 0; a < 3; ++a)
            {
                const size_t sa = static_cast<size_t>(a);
                if (std::abs(best_v[sa] - axes[sa].front()) < 0.25 * next_step[sa] ||
                    std::abs(best_v[sa] - axes[sa].back()) < 0.25 * next_step[sa])
                    on_edge = true;
            }
            cur = best_t;
            if (on_edge && moved && recenters < budget)
            {
                ++recenters; // ridge: keep the scale, move the box
                continue;
            }
            step = next_step;
        }
        residual = residual_fast(y, cur, cfg_, bs_, ue_, wavelength_, y_norm_sq);
        return cur;
    }

    AngleTriplet TripletEstimator::estimate(const Measurement &meas, const AngleTriplet *hint) const
    {
        const Eigen::VectorXcd &y = meas.stacked;
        const int n_ue = ue_.size();
        if (y.size() != static_cast<Eigen::Index>(cfg_.num_active()) * n_ue)
            throw std::invalid_argument("TripletEstimator: measurement size mismatch");

        double w_lo = policy_.omega_min, w_hi = policy_.omega_max;
        double g_lo = policy_.gamma_min, g_hi = policy_.gamma_max;
        const PairScan *scan = pair_scan_.get();
        std::unique_ptr<PairScan> local_scan;
        if (policy_.window > 0.0)
        {
            if (hint == nullptr)
                throw std::invalid_argument("TripletEstimator: windowed search needs a hint");
            w_lo = std::max(w_lo, std::min(hint->omega11, hint->omega1M) - policy_.window);
            w_hi = std::min(w_hi, std::max(hint->omega11, hint->omega1M) + policy_.window);
            g_lo = std::max(g_lo, hint->gamma - policy_.window);
            g_hi = std::min(g_hi, hint->gamma + policy_.window);
            local_scan = std::make_unique<PairScan>(policy_, cfg_, bs_, wavelength_, w_lo, w_hi);
            scan = local_scan.get();
        }

        // Stage A: reference-row AoD pair candidates.
        Eigen::VectorXcd y_row(cfg_.num_active());
        for (int i = 0; i < cfg_.num_active(); ++i)
            y_row[i] = y[static_cast<Eigen::Index>(i) * n_ue];
        const auto candidates = scan->top(y_row, policy_.top_candidates, 3.0 * policy_.pair_step);

        // Stage B + C: gamma sweep at each candidate, then full 3D zoom.
        const int g_count = std::max(2, static_cast<int>(std::lround((g_hi - g_lo) / policy_.gamma_step)));
        const auto g_samples = axis_samples(g_lo, g_hi, g_count);
        const double y_norm_sq = y.squaredNorm();
        const std::array<std::pair<double, double>, 3> bounds{
            std::make_pair(w_lo, w_hi), std::make_pair(w_lo, w_hi), std::make_pair(g_lo, g_hi)};
        double best_res = kInf;
        AngleTriplet best_t{candidates.front().w11, candidates.front().w1m, 0.5 * (g_lo + g_hi)};
        for (const auto &cand : candidates)
        {
            double g_best = g_samples.front();
            double g_best_res = kInf;
            for (double g : g_samples)
            {
                const double r = residual_fast(y, {cand.w11, cand.w1m, g}, cfg_, bs_, ue_,
                                               wavelength_, y_norm_sq);
                if (r < g_best_res)
                {
                    g_best_res = r;
                    g_best = g;
                }
            }
            double res = g_best_res;
            const AngleTriplet t = zoom(y, {cand.w11, cand.w1m, g_best},
                                        {policy_.pair_step, policy_.pair_step, policy_.gamma_step},
                                        bounds, res);
            if (res < best_res)
            {
                best_res = res;
                best_t = t;
            }
        }
        last_residual_ = best_res;
        return best_t;
    }

} // namespace nflos
