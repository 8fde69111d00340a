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

#ifndef NFLOS_RNG_HPP
#define NFLOS_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace nflos::rng
{
    // Purpose of each independent draw stream. Streams are derived from
    // (root seed, trial, purpose, instance) so results do not depend on
    // evaluation order or thread scheduling.
    enum class Purpose : std::uint64_t
    {
        placement = 1,
        pilot_noise = 2,
        ota_forward = 3,
        ota_backward = 4,
        precoder_init = 5,
        generic = 6,
    };

    // SplitMix64 finalizer, used to hash stream coordinates into a seed.
    inline std::uint64_t mix(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    class Stream
    {
    public:
        Stream(std::uint64_t root, std::uint64_t trial, Purpose purpose, std::uint64_t instance = 0)
            : engine_(mix(mix(mix(mix(root) ^ trial) ^ static_cast<std::uint64_t>(purpose)) ^ instance))
        {
        }

        double uniform(double lo, double hi)
        {
            return std::uniform_real_distribution<double>(lo, hi)(engine_);
        }

        double normal(double mean = 0.0, double stddev = 1.0)
        {
            return std::normal_distribution<double>(mean, stddev)(engine_);
        }

        // Circularly symmetric complex Gaussian with E|z|^2 = variance.
        std::complex<double> cnormal(double variance)
        {
            const double s = std::sqrt(variance * 0.5);
            return {normal(0.0, s), normal(0.0, s)};
        }

        std::uint64_t raw() { return engine_(); }

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
    };

} // namespace nflos::rng

#endif
