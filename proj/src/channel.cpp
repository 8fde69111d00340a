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

#include "nflos/channel.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nflos
{
    namespace
    {
        struct Point3
        {
            double x, y, z;
        };

        std::complex<double> ray_entry(double d, double wavelength, double amp_scale)
        {
            const double amp = amp_scale * wavelength / (4.0 * M_PI * d);
            const double phase = -2.0 * M_PI * d / wavelength;
            return std::polar(amp, phase);
        }
    } // namespace

    void RoomModel::validate() const
    {
        if (!(width > 0.0) || !(depth > 0.0) || !(height > 0.0))
            throw std::invalid_argument("RoomModel: dimensions must be positive");
        if (reflection_coeff < 0.0 || reflection_coeff > 1.0)
            throw std::invalid_argument("RoomModel: reflection coefficient outside [0, 1]");
        if (max_order < 1 || max_order > 2)
            throw std::invalid_argument("RoomModel: max_order must be 1 or 2");
    }

    void Scenario::validate() const
    {
        if (!(wavelength > 0.0))
            throw std::invalid_argument("Scenario: wavelength must be positive");
        if (!(p_bs_w > 0.0) || !(rho_pilot_w > 0.0))
            throw std::invalid_argument("Scenario: powers must be positive");
        if (!(noise_ue_w > 0.0) || !(noise_bs_w > 0.0))
            throw std::invalid_argument("Scenario: noise variances must be positive");
        room.validate();
        bs.validate();
        if (mount_height < 0.0 || mount_height > room.height)
            throw std::invalid_argument("Scenario: mount height outside the room");
        for (const auto &ue : ues)
        {
            ue.array.validate();
            for (const auto &pt : ue_positions(ue.place, bs, ue.array))
            {
                if (pt.x < 0.0 || pt.x > room.width || std::abs(pt.y) > room.depth / 2.0)
                    throw std::invalid_argument("Scenario: UE outside the room");
            }
        }
    }

    Eigen::MatrixXcd los_channel(const PairGeometry &pg, double wavelength)
    {
        if (!(wavelength > 0.0))
            throw std::invalid_argument("los_channel: wavelength must be positive");
        Eigen::MatrixXcd h(pg.dist.rows(), pg.dist.cols());
        for (Eigen::Index m = 0; m < pg.dist.cols(); ++m)
            for (Eigen::Index n = 0; n < pg.dist.rows(); ++n)
            {
                const double d = pg.dist(n, m);
                if (!(d > 0.0))
                    throw std::domain_error("los_channel: non-positive distance");
                h(n, m) = ray_entry(d, wavelength, 1.0);
            }
        return h;
    }

    Eigen::MatrixXcd nlos_channel(const Scenario &sc, int ue_index)
    {
        const auto &ue = sc.ues.at(static_cast<size_t>(ue_index));
        const auto bs2 = bs_positions(sc.bs);
        const auto ue2 = ue_positions(ue.place, sc.bs, ue.array);
        const double z0 = sc.mount_height;
        const double half_depth = sc.room.depth / 2.0;
        const double c = sc.room.reflection_coeff;

        // Mirror operators for the reflecting surfaces.
        const auto wall_pos = [&](Point3 p) { return Point3{p.x, 2.0 * half_depth - p.y, p.z}; };
        const auto wall_neg = [&](Point3 p) { return Point3{p.x, -2.0 * half_depth - p.y, p.z}; };
        const auto ceiling = [&](Point3 p) { return Point3{p.x, p.y, 2.0 * sc.room.height - p.z}; };
        const auto floor_m = [&](Point3 p) { return Point3{p.x, p.y, -p.z}; };

        std::vector<std::pair<std::vector<int>, int>> sequences; // surface ids, order
        // surfaces: 0 wall+, 1 wall-, 2 ceiling, 3 floor
        sequences.push_back({{0}, 1});
        sequences.push_back({{1}, 1});
        sequences.push_back({{2}, 1});
        if (sc.room.include_floor)
            sequences.push_back({{3}, 1});
        if (sc.room.max_order >= 2)
        {
            sequences.push_back({{0, 1}, 2}); // wall+ then wall-
            sequences.push_back({{1, 0}, 2});
            sequences.push_back({{0, 2}, 2}); // wall/ceiling composites commute
            sequences.push_back({{1, 2}, 2});
            if (sc.room.include_floor)
            {
                sequences.push_back({{0, 3}, 2});
                sequences.push_back({{1, 3}, 2});
            }
        }

        const auto apply = [&](int id, Point3 p) {
            switch (id)
            {
            case 0: return wall_pos(p);
            case 1: return wall_neg(p);
            case 2: return ceiling(p);
            default: return floor_m(p);
            }
        };

        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ue.array.size(), sc.bs.size());
        if (c == 0.0)
            return h;
        for (const auto &[seq, order] : sequences)
        {
            const double gain = std::pow(c, order);
            for (Eigen::Index n = 0; n < h.rows(); ++n)
            {
                Point3 img{ue2[static_cast<size_t>(n)].x, ue2[static_cast<size_t>(n)].y, z0};
                for (int id : seq)
                    img = apply(id, img);
                for (Eigen::Index m = 0; m < h.cols(); ++m)
                {
                    const Point3 b{bs2[static_cast<size_t>(m)].x, bs2[static_cast<size_t>(m)].y, z0};
                    const double d = std::sqrt((img.x - b.x) * (img.x - b.x) +
                                               (img.y - b.y) * (img.y - b.y) +
                                               (img.z - b.z) * (img.z - b.z));
                    h(n, m) += ray_entry(d, sc.wavelength, gain);
                }
            }
        }
        return h;
    }

    ChannelSet generate_channels(const Scenario &sc)
    {
        sc.validate();
        ChannelSet cs;
        cs.los.reserve(sc.ues.size());
        cs.nlos.reserve(sc.ues.size());
        cs.composite.reserve(sc.ues.size());
        for (int k = 0; k < sc.num_ues(); ++k)
        {
            const auto &ue = sc.ues[static_cast<size_t>(k)];
            const auto triplet = placement_to_triplet(ue.place, sc.bs, ue.array);
            const auto pg = pair_geometry(triplet, sc.bs, ue.array);
            Eigen::MatrixXcd los = los_channel(pg, sc.wavelength);
            Eigen::MatrixXcd nlos = sc.nlos_enabled
                                        ? nlos_channel(sc, k)
                                        : Eigen::MatrixXcd::Zero(los.rows(), los.cols()).eval();
            cs.composite.push_back(los + nlos);
            cs.los.push_back(std::move(los));
            cs.nlos.push_back(std::move(nlos));
        }
        return cs;
    }

    void write_channel_csv(std::ostream &os, const ChannelSet &cs)
    {
        os << "ue,component,n,m,re,im\n";
        os.precision(17);
        const auto dump = [&](const std::vector<Eigen::MatrixXcd> &mats, const char *name) {
            for (size_t k = 0; k < mats.size(); ++k)
                for (Eigen::Index m = 0; m < mats[k].cols(); ++m)
                    for (Eigen::Index n = 0; n < mats[k].rows(); ++n)
                        os << k << ',' << name << ',' << n << ',' << m << ','
                           << mats[k](n, m).real() << ',' << mats[k](n, m).imag() << '\n';
        };
        dump(cs.los, "los");
        dump(cs.nlos, "nlos");
    }

    ChannelSet read_channel_csv(std::istream &is)
    {
        std::string line;
        if (!std::getline(is, line))
            throw std::runtime_error("read_channel_csv: empty input");
        struct Entry
        {
            int ue, n, m;
            bool nlos;
            std::complex<double> v;
        };
        std::vector<Entry> entries;
        int max_ue = -1;
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            std::stringstream ss(line);
            std::string tok;
            Entry e{};
            std::getline(ss, tok, ','); e.ue = std::stoi(tok);
            std::getline(ss, tok, ','); e.nlos = (tok == "nlos");
            std::getline(ss, tok, ','); e.n = std::stoi(tok);
            std::getline(ss, tok, ','); e.m = std::stoi(tok);
            double re, im;
            std::getline(ss, tok, ','); re = std::stod(tok);
            std::getline(ss, tok, ','); im = std::stod(tok);
            e.v = {re, im};
            max_ue = std::max(max_ue, e.ue);
            entries.push_back(e);
        }
        ChannelSet cs;
        cs.los.resize(static_cast<size_t>(max_ue + 1));
        cs.nlos.resize(static_cast<size_t>(max_ue + 1));
        std::vector<int> rows(static_cast<size_t>(max_ue + 1), 0), cols(rows);
        for (const auto &e : entries)
        {
            rows[static_cast<size_t>(e.ue)] = std::max(rows[static_cast<size_t>(e.ue)], e.n + 1);
            cols[static_cast<size_t>(e.ue)] = std::max(cols[static_cast<size_t>(e.ue)], e.m + 1);
        }
        for (size_t k = 0; k < cs.los.size(); ++k)
        {
            cs.los[k] = Eigen::MatrixXcd::Zero(rows[k], cols[k]);
            cs.nlos[k] = Eigen::MatrixXcd::Zero(rows[k], cols[k]);
        }
        for (const auto &e : entries)
            (e.nlos ? cs.nlos : cs.los)[static_cast<size_t>(e.ue)](e.n, e.m) = e.v;
        cs.composite.resize(cs.los.size());
        for (size_t k = 0; k < cs.los.size(); ++k)
            cs.composite[k] = cs.los[k] + cs.nlos[k];
        return cs;
    }

} // namespace nflos
