// Copyright 2026 The lpmat Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "lpmat/error.hpp"

namespace lpmat {

/// SplitMix64 output function. Bijective 64-bit avalanche.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Seed of replicate `index` in an ensemble rooted at `base_seed`:
/// splitmix64_mix(splitmix64_mix(base_seed) ^ index). Distinct indices give
/// distinct seeds because the mix is a bijection; mixing the base first keeps
/// ensembles with nearby base seeds (1, 2, 3, ...) from sharing replicates.
constexpr std::uint64_t replicate_seed(std::uint64_t base_seed,
                                       std::uint64_t index) noexcept {
  return splitmix64_mix(splitmix64_mix(base_seed) ^ index);
}

enum class InnovationDistribution { StandardGaussian, Rademacher, CenteredUniform };

/// E Z^4 for the unit-variance version of each law.
constexpr double fourth_moment(InnovationDistribution d) noexcept {
  switch (d) {
    case InnovationDistribution::StandardGaussian: return 3.0;
    case InnovationDistribution::Rademacher: return 1.0;
    case InnovationDistribution::CenteredUniform: return 9.0 / 5.0;
  }
  return 0.0;
}

constexpr std::string_view to_string(InnovationDistribution d) noexcept {
  switch (d) {
    case InnovationDistribution::StandardGaussian: return "gaussian";
    case InnovationDistribution::Rademacher: return "rademacher";
    case InnovationDistribution::CenteredUniform: return "uniform";
  }
  return "?";
}

inline InnovationDistribution parse_distribution(std::string_view name) {
  if (name == "gaussian") return InnovationDistribution::StandardGaussian;
  if (name == "rademacher") return InnovationDistribution::Rademacher;
  if (name == "uniform") return InnovationDistribution::CenteredUniform;
  throw ValidationError("unknown innovation distribution '" + std::string(name) +
                            "' (expected gaussian, rademacher or uniform)",
                        "dist");
}

/// Random-access innovation sequence Z_t, t in Z.
///
/// The stream is the SplitMix64 sequence seeded with `seed`; its k-th word is
/// splitmix64_mix(seed + (k + 1) * gamma), so any index can be drawn without
/// generating its predecessors. Innovation t consumes words 2(t + kOrigin) and
/// 2(t + kOrigin) + 1, which places all non-positive indices before index 1 and
/// makes Z_t independent of how far back a caller reaches.
class InnovationStream {
 public:
  static constexpr std::int64_t kOrigin = std::int64_t{1} << 40;

  InnovationStream(InnovationDistribution dist, std::uint64_t seed) noexcept
      : dist_(dist), seed_(seed) {}

  InnovationDistribution distribution() const noexcept { return dist_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double operator()(std::int64_t t) const noexcept {
    const auto k = 2 * static_cast<std::uint64_t>(t + kOrigin);
    const std::uint64_t w0 = word(k);
    switch (dist_) {
      case InnovationDistribution::StandardGaussian: {
        // Box-Muller, cosine branch only.
        const double u1 = unit_open_closed(w0);
        const double u2 = unit_closed_open(word(k + 1));
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
      }
      case InnovationDistribution::Rademacher:
        return (w0 >> 63) != 0 ? 1.0 : -1.0;
      case InnovationDistribution::CenteredUniform:
        return std::numbers::sqrt3 * (2.0 * unit_closed_open(w0) - 1.0);
    }
    return 0.0;
  }

  bool operator==(const InnovationStream&) const = default;

 private:
  std::uint64_t word(std::uint64_t k) const noexcept {
    return splitmix64_mix(seed_ + (k + 1) * kGoldenGamma);
  }
  static double unit_closed_open(std::uint64_t w) noexcept {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
  }
  static double unit_open_closed(std::uint64_t w) noexcept {
    return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
  }

  InnovationDistribution dist_;
  std::uint64_t seed_;
};

}  // namespace lpmat
