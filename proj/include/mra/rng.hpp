// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mra {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Stream domains keep independent consumers of one user seed decorrelated.
enum class RngDomain : std::uint64_t {
  signal = 1,
  observation = 2,
  phase_init = 3,
  trial = 4,
};

/// Counter-style splittable generator: the stream for (seed, domain, index)
/// is reproducible in isolation, so observation j can be generated on any
/// thread without sequencing. splitmix64 core, Box-Muller gaussians.
class RngStream {
 public:
  RngStream(std::uint64_t seed, RngDomain domain, std::uint64_t index) {
    state_ = detail::mix64(seed + 0x9E3779B97F4A7C15ULL);
    state_ = detail::mix64(state_ ^ (static_cast<std::uint64_t>(domain) * 0xD1B54A32D192ED03ULL + 1));
    state_ = detail::mix64(state_ ^ (index * 0x8CB92BA72F3D8DD7ULL + 1));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; pairs are cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  /// Uniform integer in [0, n).
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mra
