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

#include "nflos/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace nflos
{

    LinearArray LinearArray::uniform_length(int n, double total_length)
    {
        if (n < 1 || (n > 1 && total_length <= 0.0))
            throw std::invalid_argument("uniform_length: need n >= 1 and a positive length");
        LinearArray a;
        a.spacings.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            a.spacings[static_cast<size_t>(i)] = (n == 1) ? 0.0 : total_length * i / (n - 1);
        return a;
    }

    LinearArray LinearArray::uniform_spacing(int n, double spacing)
    {
        if (n < 1 || (n > 1 && spacing <= 0.0))
            throw std::invalid_argument("uniform_spacing: need n >= 1 and a positive spacing");
        LinearArray a;
        a.spacings.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            a.spacings[static_cast<size_t>(i)] = spacing * i;
        return a;
    }

    void LinearArray::validate() const
    {
        if (spacings.empty())
            throw std::invalid_argument("LinearArray: empty spacing list");
        if (spacings.front() != 0.0)
            throw std::invalid_argument("LinearArray: first spacing must be 0");
        for (size_t i = 1; i < spacings.size(); ++i)
            if (!(spacings[i] > spacings[i - 1]))
                throw std::invalid_argument("LinearArray: spacings must be strictly increasing");
    }

    double pair_distance(const AngleTriplet &t, double d11, double lb, double lu)
    {
        if (!(d11 > 0.0))
            throw std::invalid_argument("pair_distance: d11 must be positive");
        const double s = d11 * d11 +
                         2.0 * d11 * (lb * std::sin(t.omega11) - lu * std::sin(t.omega11 + t.gamma)) -
                         2.0 * lb * lu * std::cos(t.gamma) + lb * lb + lu * lu;
        if (s < 0.0)
            throw std::domain_error("pair_distance: negative radicand (infeasible triplet)");
        return std::sqrt(s);
    }

    double pair_aod(const AngleTriplet &t, double d11, double lb, double lu)
    {
        const double den = d11 * std::cos(t.omega11) - lu * std::sin(t.gamma);
        if (den == 0.0)
            throw std::domain_error("pair_aod: zero denominator");
        const double num = d11 * std::sin(t.omega11) - lu * std::cos(t.gamma) + lb;
        return std::atan(num / den);
    }

    double ref_distance_from_aods(double omega11, double omega1M, double lbs_m)
    {
        const double den = std::tan(omega1M) * std::cos(omega11) - std::sin(omega11);
        if (den == 0.0 || !std::isfinite(den))
            throw std::domain_error("ref_distance_from_aods: parallel rays");
        return lbs_m / den;
    }

    std::vector<Point2> bs_positions(const LinearArray &bs)
    {
        std::vector<Point2> p(static_cast<size_t>(bs.size()));
        for (size_t m = 0; m < p.size(); ++m)
            p[m] = {0.0, bs.spacings[m]};
        return p;
    }

    std::vector<Point2> ue_positions(const Placement &p, const LinearArray &bs, const LinearArray &ue)
    {
        const double cy = bs.length() / 2.0; // BS aperture midpoint
        const double ux = -std::sin(p.gamma);
        const double uy = std::cos(p.gamma);
        const double half = ue.length() / 2.0;
        const Point2 center{p.d * std::cos(p.beta), cy - p.d * std::sin(p.beta)};
        const Point2 first{center.x - half * ux, center.y - half * uy};
        std::vector<Point2> pts(static_cast<size_t>(ue.size()));
        for (size_t n = 0; n < pts.size(); ++n)
            pts[n] = {first.x + ue.spacings[n] * ux, first.y + ue.spacings[n] * uy};
        return pts;
    }

    AngleTriplet placement_to_triplet(const Placement &p, const LinearArray &bs, const LinearArray &ue)
    {
        if (!(p.d > 0.0))
            throw std::invalid_argument("placement_to_triplet: d must be positive");
        if (!(std::abs(p.beta) < M_PI / 2.0))
            throw std::invalid_argument("placement_to_triplet: |beta| must be below pi/2");
        const auto pts = ue_positions(p, bs, ue);
        if (pts.front().x <= 0.0 || pts.back().x <= 0.0)
            throw std::domain_error("placement_to_triplet: UE behind the array");
        const Point2 u1 = pts.front();
        AngleTriplet t;
        t.omega11 = std::atan2(-u1.y, u1.x);
        t.omega1M = std::atan2(bs.length() - u1.y, u1.x);
        t.gamma = p.gamma;
        return t;
    }

    PairGeometry pair_geometry(const AngleTriplet &t, const LinearArray &bs, const LinearArray &ue)
    {
        const double d11 = ref_distance_from_aods(t.omega11, t.omega1M, bs.length());
        return pair_geometry(t, d11, bs, ue);
    }

    PairGeometry pair_geometry(const AngleTriplet &t, double d11, const LinearArray &bs, const LinearArray &ue)
    {
        if (!(d11 > 0.0))
            throw std::domain_error("pair_geometry: infeasible triplet (d11 <= 0)");
        PairGeometry g;
        g.d11 = d11;
        const int n_ue = ue.size();
        const int n_bs = bs.size();
        g.dist.resize(n_ue, n_bs);
        g.aod.resize(n_ue, n_bs);
        for (int m = 0; m < n_bs; ++m)
        {
            const double lb = bs.spacings[static_cast<size_t>(m)];
            for (int n = 0; n < n_ue; ++n)
            {
                const double lu = ue.spacings[static_cast<size_t>(n)];
                g.dist(n, m) = pair_distance(t, d11, lb, lu);
                g.aod(n, m) = pair_aod(t, d11, lb, lu);
            }
        }
        return g;
    }

    std::vector<Point2> ue_coordinates(const AngleTriplet &t, double d11, const LinearArray &ue, Point2 bs_origin)
    {
        if (!(d11 > 0.0))
            throw std::invalid_argument("ue_coordinates: d11 must be positive");
        const Point2 first{bs_origin.x + d11 * std::cos(t.omega11),
                           bs_origin.y - d11 * std::sin(t.omega11)};
        std::vector<Point2> pts(static_cast<size_t>(ue.size()));
        for (size_t n = 0; n < pts.size(); ++n)
            pts[n] = {first.x - ue.spacings[n] * std::sin(t.gamma),
                      first.y + ue.spacings[n] * std::cos(t.gamma)};
        return pts;
    }

} // namespace nflos
