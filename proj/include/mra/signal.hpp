// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mra/core.hpp"
#include "mra/fft.hpp"
#include "mra/matrix.hpp"

namespace mra {

/// A length-N real signal, N >= 2, all samples finite.
struct RealSignal {
  std::vector<double> samples;

  RealSignal() = default;
  explicit RealSignal(std::vector<double> s) : samples(std::move(s)) {
    if (samples.size() < 2)
      throw std::invalid_argument("RealSignal: length must be at least 2");
    for (double v : samples)
      if (!std::isfinite(v)) throw std::invalid_argument("RealSignal: non-finite sample");
  }

  std::size_t size() const { return samples.size(); }
  double operator[](std::size_t i) const { return samples[i]; }
  double mean() const {
    double s = 0.0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
  }
  double norm2() const {
    double s = 0.0;
    for (double v : samples) s += v * v;
    return std::sqrt(s);
  }
  bool operator==(const RealSignal& o) const { return samples == o.samples; }
};

/// DFT coefficients of a signal; conjugate-symmetric when the source is real.
struct FourierCoeffs {
  std::vector<cdouble> coeffs;

  std::size_t size() const { return coeffs.size(); }
  cdouble operator[](std::size_t k) const { return coeffs[k]; }
};

/// A vector of unit-modulus Fourier phases; entry 0 is 1 under the
/// mean-subtracted convention.
struct PhaseVector {
  std::vector<cdouble> phases;

  std::size_t size() const { return phases.size(); }
  cdouble operator[](std::size_t k) const { return phases[k]; }
};

/// Checks the PhaseVector invariants: unit modulus and phases[0] == 1.
inline void validate_phase_vector(const PhaseVector& p, double tol = 1e-9) {
  if (p.size() < 2) throw std::invalid_argument("PhaseVector: length must be at least 2");
  for (cdouble z : p.phases)
    if (std::abs(std::abs(z) - 1.0) > tol)
      throw std::invalid_argument("PhaseVector: entry is not unit-modulus");
  if (std::abs(p.phases[0] - cdouble(1.0, 0.0)) > tol)
    throw std::invalid_argument("PhaseVector: entry 0 must be 1");
}

struct BispectrumMatrix {
  CMatrix entries;
  std::size_t dim() const { return entries.dim(); }
};

/// Entrywise phase of a bispectrum; Hermitian with unit-modulus entries.
struct NormalizedBispectrum {
  CMatrix entries;
  std::size_t dim() const { return entries.dim(); }
};

/// Unnormalized forward DFT (matches the estimator definitions downstream).
inline FourierCoeffs dft(const RealSignal& x) {
  if (x.size() < 2) throw std::invalid_argument("dft: length must be at least 2");
  std::vector<cdouble> buf(x.samples.begin(), x.samples.end());
  FftPlan plan(buf.size());
  plan.forward(buf);
  return FourierCoeffs{std::move(buf)};
}

/// Inverse DFT carrying the 1/N factor; output is complex, realness is the
/// caller's claim to check.
inline std::vector<cdouble> idft(const FourierCoeffs& y) {
  if (y.size() < 2) throw std::invalid_argument("idft: length must be at least 2");
  std::vector<cdouble> buf = y.coeffs;
  FftPlan plan(buf.size());
  plan.inverse(buf);
  return buf;
}

/// output[n] = input[(n + s) mod N]; any integer s accepted.
inline RealSignal cyclic_shift(const RealSignal& x, std::ptrdiff_t s) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  const std::size_t off = mod_index(s, n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x.samples[(i + off) % n];
  return RealSignal{std::move(out)};
}

namespace detail {

/// Force exact conjugate symmetry z[N-k] == conj(z[k]) by averaging the
/// redundant pair; bins 0 and N/2 become exactly real. Keeps every later
/// triple product exactly Hermitian in floating point.
inline void enforce_conjugate_symmetry(std::vector<cdouble>& z) {
  const std::size_t n = z.size();
  z[0] = cdouble(z[0].real(), 0.0);
  for (std::size_t k = 1; 2 * k < n; ++k) {
    const cdouble avg = 0.5 * (z[k] + std::conj(z[n - k]));
    z[k] = avg;
    z[n - k] = std::conj(avg);
  }
  if (n % 2 == 0) z[n / 2] = cdouble(z[n / 2].real(), 0.0);
}

inline double max_abs(const std::vector<cdouble>& z) {
  double best = 0.0;
  for (cdouble v : z) best = std::max(best, std::abs(v));
  return best;
}

/// Bispectrum of one conjugate-symmetric coefficient vector, built on the
/// upper triangle and mirrored so the result is Hermitian bit-for-bit.
inline CMatrix bispectrum_from_coeffs(const std::vector<cdouble>& z) {
  const std::size_t n = z.size();
  CMatrix b(n);
  for (std::size_t k1 = 0; k1 < n; ++k1) {
    b(k1, k1) = cdouble(std::norm(z[k1]) * z[0].real(), 0.0);
    for (std::size_t k2 = k1 + 1; k2 < n; ++k2) {
      const cdouble v = z[k1] * std::conj(z[k2]) * z[(k2 - k1) % n];
      b(k1, k2) = v;
      b(k2, k1) = std::conj(v);
    }
  }
  return b;
}

}  // namespace detail

/// B[k1,k2] = y[k1] * conj(y[k2]) * y[(k2-k1) mod N]. Requires conjugate
/// symmetry (real source signal); the result is exactly Hermitian.
inline BispectrumMatrix bispectrum(const FourierCoeffs& y) {
  const std::size_t n = y.size();
  if (n < 2) throw std::invalid_argument("bispectrum: length must be at least 2");
  std::vector<cdouble> z = y.coeffs;
  const double scale = detail::max_abs(z);
  for (std::size_t k = 1; 2 * k <= n; ++k) {
    if (std::abs(z[k] - std::conj(z[(n - k) % n])) > 1e-6 * std::max(scale, 1.0))
      throw std::invalid_argument("bispectrum: coefficients are not conjugate-symmetric");
  }
  detail::enforce_conjugate_symmetry(z);
  return BispectrumMatrix{detail::bispectrum_from_coeffs(z)};
}

/// Entrywise phase of B with the zero-maps-to-1 convention, then exact
/// Hermitian symmetrization from the upper triangle (so eigenvalues of the
/// result are exactly real).
inline NormalizedBispectrum normalize_bispectrum(const BispectrumMatrix& b) {
  const std::size_t n = b.dim();
  if (n < 2) throw std::invalid_argument("normalize_bispectrum: empty matrix");
  if (hermitian_residual(b.entries) > 1e-6)
    throw std::runtime_error("normalize_bispectrum: matrix is not Hermitian (corrupted estimate)");
  const double scale = max_abs_entry(b.entries);
  CMatrix out(n);
  for (std::size_t r = 0; r < n; ++r) {
    out(r, r) = phase(cdouble(b.entries(r, r).real(), 0.0), scale);
    for (std::size_t c = r + 1; c < n; ++c) {
      const cdouble p = phase(b.entries(r, c), scale);
      out(r, c) = p;
      out(c, r) = std::conj(p);
    }
  }
  return NormalizedBispectrum{std::move(out)};
}

/// Shift-aligned relative error and the minimizing shift.
struct AlignmentError {
  double error = 0.0;
  std::size_t shift = 0;
};

/// min over s of ||R_s estimate - truth||_2 / ||truth||_2. The shift search
/// runs through an FFT cross-correlation; the value at the winning shift is
/// recomputed directly.
inline AlignmentError relative_error(const RealSignal& truth, const RealSignal& estimate) {
  const std::size_t n = truth.size();
  if (estimate.size() != n)
    throw std::invalid_argument("relative_error: length mismatch");
  const double truth_norm = truth.norm2();
  if (truth_norm == 0.0)
    throw std::invalid_argument("relative_error: truth signal is identically zero");

  // c(s) = <R_s estimate, truth> for all s at once
  FftPlan plan(n);
  std::vector<cdouble> a(estimate.samples.begin(), estimate.samples.end());
  std::vector<cdouble> b(truth.samples.begin(), truth.samples.end());
  plan.forward(a);
  plan.forward(b);
  for (std::size_t k = 0; k < n; ++k) a[k] *= std::conj(b[k]);
  plan.inverse(a);

  std::size_t best_s = 0;
  double best_c = a[0].real();
  for (std::size_t s = 1; s < n; ++s) {
    if (a[s].real() > best_c) {
      best_c = a[s].real();
      best_s = s;
    }
  }

  double err2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = estimate.samples[(i + best_s) % n] - truth.samples[i];
    err2 += d * d;
  }
  return AlignmentError{std::sqrt(err2) / truth_norm, best_s};
}

}  // namespace mra
