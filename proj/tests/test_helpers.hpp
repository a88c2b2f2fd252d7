// SPDX-License-Identifier: Apache-2.0
//
// Test-side oracles, kept independent of the library's implementation paths:
// direct-summation DFT, exhaustive shift search, and plain std::mt19937_64
// data generators.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "mra/mra.hpp"

namespace testutil {

/// O(N^2) direct-summation unnormalized DFT.
inline std::vector<mra::cdouble> direct_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<mra::cdouble> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    mra::cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = -2.0 * std::numbers::pi * double(i) * double(k) / double(n);
      acc += x[i] * mra::cdouble(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

struct Aligned {
  double error;
  std::size_t shift;
};

/// Exhaustive O(N^2) search over every cyclic shift; ties go to the
/// smallest shift.
inline Aligned exhaustive_relative_error(const mra::RealSignal& truth,
                                         const mra::RealSignal& estimate) {
  const std::size_t n = truth.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_s = 0;
  for (std::size_t s = 0; s < n; ++s) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = estimate.samples[(i + s) % n] - truth.samples[i];
      d2 += d * d;
    }
    if (d2 < best) {
      best = d2;
      best_s = s;
    }
  }
  return {std::sqrt(best) / truth.norm2(), best_s};
}

/// Random signal from std::mt19937_64, decoupled from the library RNG.
inline mra::RealSignal random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> s(n);
  for (double& v : s) v = dist(gen);
  return mra::RealSignal{std::move(s)};
}

inline mra::RealSignal zero_mean(mra::RealSignal x) {
  const double mu = x.mean();
  for (double& v : x.samples) v -= mu;
  return x;
}

/// The true normalized phases of a signal's DFT (the inversion target).
inline mra::PhaseVector true_phases(const mra::RealSignal& x) {
  const mra::FourierCoeffs y = mra::dft(x);
  double scale = 0.0;
  for (mra::cdouble z : y.coeffs) scale = std::max(scale, std::abs(z));
  mra::PhaseVector p;
  p.phases.resize(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) p.phases[k] = mra::phase(y.coeffs[k], scale);
  return p;
}

/// Exact power spectrum |y|^2 of a clean signal.
inline mra::PowerSpectrum exact_power(const mra::RealSignal& x) {
  const mra::FourierCoeffs y = mra::dft(x);
  mra::PowerSpectrum p;
  p.values.resize(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) p.values[k] = std::norm(y.coeffs[k]);
  return p;
}

inline double frob_diff(const mra::CMatrix& a, const mra::CMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim() * a.dim(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

/// Clean-signal pipeline inputs (exact invariants) for a zero-mean signal.
struct CleanSetup {
  mra::RealSignal x;
  mra::PowerSpectrum power;
  mra::NormalizedBispectrum nb;
  double mean = 0.0;
};

inline CleanSetup clean_setup(std::size_t n, std::uint64_t seed) {
  CleanSetup s;
  s.x = zero_mean(mra::generate_gaussian_signal(n, seed));
  s.mean = s.x.mean();
  s.power = exact_power(s.x);
  s.nb = mra::normalize_bispectrum(mra::bispectrum(mra::dft(s.x)));
  return s;
}

}  // namespace testutil
