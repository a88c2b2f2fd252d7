// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace mra {

using cdouble = std::complex<double>;

/// Relative threshold below which a complex value counts as zero when its
/// phase is extracted. Zero maps to phase 1 by convention.
inline constexpr double kPhaseZeroTol = 1e-12;

/// Reduce an arbitrary (possibly negative) index into [0, n).
inline std::size_t mod_index(std::ptrdiff_t i, std::size_t n) {
  std::ptrdiff_t m = i % static_cast<std::ptrdiff_t>(n);
  if (m < 0) m += static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(m);
}

/// Unit-modulus phase of z. Values with |z| <= kPhaseZeroTol * scale are
/// treated as zero and map to 1. `scale` is the magnitude of the containing
/// object (max entry of a matrix or vector), 1 for bare scalars.
inline cdouble phase(cdouble z, double scale = 1.0) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("phase: non-finite input");
  // sqrt(norm) is much cheaper than hypot; fall back only if norm overflows
  double mag = std::sqrt(std::norm(z));
  if (!std::isfinite(mag)) mag = std::abs(z);
  if (mag <= kPhaseZeroTol * scale) return {1.0, 0.0};
  return z / mag;
}

}  // namespace mra
