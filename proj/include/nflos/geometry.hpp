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

#ifndef NFLOS_GEOMETRY_HPP
#define NFLOS_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace nflos
{
    // Coordinate convention used throughout:
    //   BS antenna 1 at the origin, BS array along +y.
    //   UE antenna 1 at (d11*cos(omega11), -d11*sin(omega11)); bearings are
    //   measured from +x (broadside), positive angles towards -y.
    //   UE antenna n is offset from antenna 1 by l_ue_n * (-sin(gamma), +cos(gamma)).
    // All angles are in radians; degrees exist only at the CLI/config boundary.

    struct Point2
    {
        double x = 0.0;
        double y = 0.0;
    };

    // Linear antenna array described by element distances from element 1.
    // spacings[0] must be exactly 0 and values must be strictly increasing.
    struct LinearArray
    {
        std::vector<double> spacings;

        int size() const { return static_cast<int>(spacings.size()); }
        double length() const { return spacings.back(); }

        // n equally spaced elements spanning total_length.
        static LinearArray uniform_length(int n, double total_length);
        // n elements with a fixed inter-element spacing.
        static LinearArray uniform_spacing(int n, double spacing);

        void validate() const; // throws std::invalid_argument on violation
    };

    // The three reference angles (omega_{1,1}, omega_{1,M}, gamma).
    struct AngleTriplet
    {
        double omega11 = 0.0;
        double omega1M = 0.0;
        double gamma = 0.0;
    };

    // UE pose relative to the BS: center-to-center distance d, center offset
    // angle beta (positive towards -y) and array rotation gamma.
    struct Placement
    {
        double d = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
    };

    // All antenna-pair distances and departure angles for one BS/UE pair.
    struct PairGeometry
    {
        Eigen::MatrixXd dist; // N x M, d_{n,m} in meters
        Eigen::MatrixXd aod;  // N x M, omega_{n,m} in radians
        double d11 = 0.0;
    };

    // Closed-form distance between BS element at spacing lb and UE element at
    // spacing lu, given the reference distance d11. Throws std::domain_error
    // when the radicand is negative (infeasible triplet).
    double pair_distance(const AngleTriplet &t, double d11, double lb, double lu);

    // Closed-form departure angle for the same antenna pair. Throws
    // std::domain_error on a vanishing denominator.
    double pair_aod(const AngleTriplet &t, double d11, double lb, double lu);

    // Reference distance recovered from the two outermost departure angles.
    // May return a non-positive value; callers treat that as infeasible.
    // Throws std::domain_error when the two rays are parallel.
    double ref_distance_from_aods(double omega11, double omega1M, double lbs_m);

    // Scenario pose -> estimation parameterization. Throws when the UE ends
    // up behind the array.
    AngleTriplet placement_to_triplet(const Placement &p, const LinearArray &bs, const LinearArray &ue);

    // Full N x M distance/AoD tables for a feasible triplet; the reference
    // distance is recovered from the two AoDs and the BS aperture.
    PairGeometry pair_geometry(const AngleTriplet &t, const LinearArray &bs, const LinearArray &ue);
    // Same with an explicit reference distance (needed e.g. for single-antenna
    // arrays whose aperture carries no distance information).
    PairGeometry pair_geometry(const AngleTriplet &t, double d11, const LinearArray &bs, const LinearArray &ue);

    // UE antenna positions recovered from a triplet and its reference
    // distance, relative to the position of BS antenna 1.
    std::vector<Point2> ue_coordinates(const AngleTriplet &t, double d11, const LinearArray &ue, Point2 bs_origin);

    // Antenna positions in the 2D plane of the coordinate convention.
    std::vector<Point2> bs_positions(const LinearArray &bs);
    std::vector<Point2> ue_positions(const Placement &p, const LinearArray &bs, const LinearArray &ue);

} // namespace nflos

#endif
