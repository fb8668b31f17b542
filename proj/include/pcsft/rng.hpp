// Copyright 2026 The pcsft Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace pcsft {

// Algorithm identifier recorded in every output for provenance. Bump the
// version if any bit of the sampling path changes.
inline constexpr std::string_view kRngId = "pcsft-splitmix64-boxmuller/v1";

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Vigna 2015 / Steele et al. 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless substream derivation: stream k of a master seed starts at a
/// hashed state, so any (seed, sample-index) pair maps to the same draws
/// regardless of how samples are partitioned across workers.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t k) {
    return mix64(master ^ mix64(k + kGolden));
}

/// SplitMix64 generator. 64-bit state, fixed increment.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform double in (0, 1]. The +1 keeps log() finite in Box-Muller.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard real normal via Box-Muller (one value per call; the pair
    /// is drawn together so the stream layout is fixed).
    std::pair<double, double> next_normal_pair() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    /// Circularly symmetric standard complex normal: (x + iy)/sqrt(2),
    /// so E|zeta|^2 = 1.
    std::complex<double> next_complex_normal() {
        const auto [x, y] = next_normal_pair();
        return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
    }

  private:
    std::uint64_t state_;
};

/// Generator for sample index n under a master seed.
inline SplitMix64 sample_stream(std::uint64_t master, std::uint64_t n) {
    return SplitMix64(substream_seed(master, n));
}

} // namespace rng
} // namespace pcsft
