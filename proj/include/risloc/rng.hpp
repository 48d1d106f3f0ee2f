// SPDX-License-Identifier: Apache-2.0
//
// rislocate - RIS-assisted near-field localization library and simulator
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

#ifndef RISLOC_RNG_HPP
#define RISLOC_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace risloc
{
    // SplitMix64 step; used for seed derivation and engine seeding.
    inline std::uint64_t splitmix64(std::uint64_t &state)
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Stable per-trial stream seed from (base seed, sweep index, trial index).
    inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0)
    {
        std::uint64_t s = base;
        std::uint64_t h = splitmix64(s);
        s ^= a + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h = splitmix64(s);
        s ^= b + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        return splitmix64(s);
    }

    // Deterministic random stream. mt19937_64 output is pinned by the C++
    // standard and the transforms below are plain arithmetic, so a given seed
    // reproduces the same draws on any platform.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed)
        {
            std::uint64_t s = seed;
            engine_.seed(splitmix64(s));
        }

        std::uint64_t raw() { return engine_(); }

        // Uniform on [0, 1).
        double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        // Uniform on [lo, hi).
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

        // Real standard normal via Box-Muller.
        double normal()
        {
            if (have_spare_)
            {
                have_spare_ = false;
                return spare_;
            }
            double u1 = uniform01();
            while (u1 <= 0.0)
                u1 = uniform01();
            double u2 = uniform01();
            double radius = std::sqrt(-2.0 * std::log(u1));
            double angle = 2.0 * M_PI * u2;
            spare_ = radius * std::sin(angle);
            have_spare_ = true;
            return radius * std::cos(angle);
        }

        // Circularly-symmetric complex normal with E{|z|^2} = 1.
        std::complex<double> cnormal()
        {
            double u1 = uniform01();
            while (u1 <= 0.0)
                u1 = uniform01();
            double u2 = uniform01();
            double radius = std::sqrt(-std::log(u1));
            double angle = 2.0 * M_PI * u2;
            return {radius * std::cos(angle), radius * std::sin(angle)};
        }

    private:
        std::mt19937_64 engine_;
        bool have_spare_ = false;
        double spare_ = 0.0;
    };

} // namespace risloc

#endif // RISLOC_RNG_HPP
