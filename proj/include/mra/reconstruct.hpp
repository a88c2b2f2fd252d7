// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mra/invariants.hpp"
#include "mra/signal.hpp"

namespace mra {

struct ReconstructionResult {
  RealSignal x_hat;
  FourierCoeffs y_hat;
  std::optional<double> rel_error;
  std::optional<std::size_t> aligning_shift;
  std::string method;
  std::map<std::string, double> diagnostics;
};

/// Assemble the signal estimate from its three recovered pieces: DC from the
/// mean (y[0] = N mu, far lower variance than the power-spectrum route),
/// magnitudes from the power spectrum (negative bins clamp to zero, the
/// projection onto the feasible set), phases from the inverter. Conjugate
/// symmetry is enforced on y before the inverse DFT, so the imaginary residue
/// is structural rounding only.
inline ReconstructionResult assemble(double mean_hat, const PowerSpectrum& power_hat,
                                     const PhaseVector& phases, std::string method = {}) {
  const std::size_t n = phases.size();
  if (power_hat.size() != n)
    throw std::invalid_argument("assemble: power spectrum / phase length mismatch");
  if (n < 2) throw std::invalid_argument("assemble: length must be at least 2");
  if (!std::isfinite(mean_hat)) throw std::invalid_argument("assemble: non-finite mean");
  for (double p : power_hat.values)
    if (!std::isfinite(p)) throw std::invalid_argument("assemble: non-finite power entry");
  validate_phase_vector(phases, 1e-6);

  std::vector<cdouble> y(n);
  y[0] = cdouble(static_cast<double>(n) * mean_hat, 0.0);
  std::size_t clamped = 0;
  for (std::size_t k = 1; k < n; ++k) {
    double p = power_hat[k];
    if (p < 0.0) {
      p = 0.0;
      ++clamped;
    }
    y[k] = std::sqrt(p) * phases.phases[k];
  }
  detail::enforce_conjugate_symmetry(y);

  FourierCoeffs y_hat{std::move(y)};
  std::vector<cdouble> x_complex = idft(y_hat);

  double re2 = 0.0, im2 = 0.0;
  for (const cdouble& v : x_complex) {
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
  }
  const double residue = std::sqrt(im2);
  if (residue > 1e-6 * std::max(std::sqrt(re2), 1e-300))
    throw std::runtime_error("assemble: inverse DFT is not real (imag residue too large)");

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = x_complex[i].real();

  ReconstructionResult res;
  res.x_hat = RealSignal{std::move(x)};
  res.y_hat = std::move(y_hat);
  res.method = std::move(method);
  res.diagnostics["clamped_bins"] = static_cast<double>(clamped);
  res.diagnostics["imag_residue"] = residue;
  return res;
}

/// Score a reconstruction against the ground truth (simulation mode).
inline void evaluate(ReconstructionResult& result, const RealSignal& truth) {
  const AlignmentError align = relative_error(truth, result.x_hat);
  result.rel_error = align.error;
  result.aligning_shift = align.shift;
}

}  // namespace mra
