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

#ifndef NFLOS_CHANNEL_HPP
#define NFLOS_CHANNEL_HPP

#include "nflos/geometry.hpp"

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace nflos
{
    // Rectangular room for the image-source reflections. The BS wall sits at
    // x = 0, side walls at y = +-depth/2, floor at z = 0, ceiling at z = height.
    struct RoomModel
    {
        double width = 15.0;  // m, along x
        double depth = 17.0;  // m, along y
        double height = 8.0;  // m, along z
        double reflection_coeff = 0.6; // per bounce, in [0, 1]
        int max_order = 2;             // 1 or 2
        bool include_floor = false;

        void validate() const;
    };

    struct UeNode
    {
        LinearArray array;
        Placement place;
    };

    struct Scenario
    {
        double wavelength = 0.03; // m
        LinearArray bs;
        std::vector<UeNode> ues;
        RoomModel room;
        double p_bs_w = 0.0;     // precoding power budget, W
        double rho_pilot_w = 0.0; // pilot power budget, W
        double noise_ue_w = 0.0;  // per-UE noise variance, W
        double noise_bs_w = 0.0;  // BS noise variance, W
        std::uint64_t seed = 1;
        bool nlos_enabled = true;
        double mount_height = 1.5; // m, antenna plane above the floor

        int num_ues() const { return static_cast<int>(ues.size()); }
        void validate() const;
    };

    struct ChannelSet
    {
        std::vector<Eigen::MatrixXcd> los;
        std::vector<Eigen::MatrixXcd> nlos;
        std::vector<Eigen::MatrixXcd> composite; // always los + nlos
    };

    // Free-space LoS entries: (lambda / 4 pi d) * exp(-j 2 pi d / lambda).
    Eigen::MatrixXcd los_channel(const PairGeometry &pg, double wavelength);

    // Image-source NLoS component for one UE: first/second-order reflections
    // off the side walls and ceiling (optionally the floor).
    Eigen::MatrixXcd nlos_channel(const Scenario &sc, int ue_index);

    ChannelSet generate_channels(const Scenario &sc);

    // CSV interchange: rows of (ue, component, n, m, re, im).
    void write_channel_csv(std::ostream &os, const ChannelSet &cs);
    ChannelSet read_channel_csv(std::istream &is);

} // namespace nflos

#endif
