// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mra/rng.hpp"
#include "mra/signal.hpp"
#include "mra/spectral.hpp"

namespace mra {

/// Frequency marching: fill the phases recursively from low frequencies,
/// since B~[k1,k] = y~[k1] conj(y~[k]) y~[k-k1] solves to
/// y~[k] = y~[k1] y~[k-k1] conj(B~[k1,k]). The redundant k1 estimates are
/// vector-averaged before re-projection. O(N^2).
///
/// The recursion only pins the phases up to a continuous rotation
/// y~[k] e^{i k alpha} (bin 1 is seeded with phase 1, which is generally not
/// reachable by an integer shift). Conjugate symmetry quantizes alpha to
/// integer shifts, and every mirror pair measures the defect the same way:
/// z[k] z[N-k] is constant across k. Averaging those products and rotating
/// it out snaps the result onto an integer-shift copy of the true phases.
inline PhaseVector frequency_marching(const NormalizedBispectrum& nb) {
  const std::size_t n = nb.dim();
  if (n < 2) throw std::invalid_argument("frequency_marching: matrix too small");
  std::vector<cdouble> z(n, cdouble(1.0, 0.0));  // z[0] = z[1] = 1 gauge

  for (std::size_t k = 2; k < n; ++k) {
    cdouble acc{0.0, 0.0};
    const std::size_t terms = k / 2;
    // conj(B~[k1, k]) = B~[k, k1]: read along row k, which is contiguous
    for (std::size_t k1 = 1; k1 <= terms; ++k1)
      acc += z[k1] * z[k - k1] * nb.entries(k, k1);
    const double mag = std::sqrt(std::norm(acc)) / static_cast<double>(terms);
    if (mag <= kPhaseZeroTol)
      throw std::runtime_error("frequency_marching: degenerate frequency k=" + std::to_string(k));
    z[k] = acc * (1.0 / (mag * static_cast<double>(terms)));
  }

  // close the gauge: z[k] z[N-k] = e^{-i N theta} for every pair
  cdouble defect{0.0, 0.0};
  for (std::size_t k = 1; 2 * k < n; ++k) defect += z[k] * z[n - k];
  if (std::abs(defect) > kPhaseZeroTol) {
    const double beta = std::arg(defect) / static_cast<double>(n);
    const cdouble step(std::cos(beta), -std::sin(beta));
    cdouble rot = step;
    for (std::size_t k = 1; k < n; ++k, rot *= step) z[k] *= rot;
  }

  PhaseVector out{std::move(z)};
  out.phases[0] = cdouble(1.0, 0.0);
  enforce_phase_conjugate_symmetry(out);
  return out;
}

/// Per-iteration record of the synchronization fixed-point scheme.
struct SynchronizationTrace {
  std::vector<PhaseVector> iterates;   // starts with the init
  std::vector<double> residuals;       // ||z^{t+1} - z^t||_2 per update
  std::optional<std::size_t> converged_at;  // 1-based update count, set iff residual < tol
};

struct SyncResult {
  PhaseVector phases;
  SynchronizationTrace trace;
};

/// Fixed-point phase synchronization. Near z = y~ the matrix
/// B~ o conj(C(z)) peels off the circulant factor and approaches the
/// rank-one y~ y~*, so z^{t+1} = phase((B~ o conj(C(z^t))) z^t) is a
/// power-iteration-like update; entry 0 is re-pinned to 1 each step.
/// Non-convergence within max_iters is reported in the trace, not an error.
inline SyncResult iterative_phase_synchronization(const NormalizedBispectrum& nb,
                                                  const PhaseVector& init,
                                                  std::size_t max_iters = 15,
                                                  double tol = 1e-8) {
  const std::size_t n = nb.dim();
  if (init.size() != n)
    throw std::invalid_argument("iterative_phase_synchronization: init length mismatch");
  if (max_iters < 1) throw std::invalid_argument("iterative_phase_synchronization: max_iters < 1");
  if (!(tol > 0.0)) throw std::invalid_argument("iterative_phase_synchronization: tol must be positive");
  validate_phase_vector(init, 1e-8);

  SyncResult res;
  res.trace.iterates.push_back(init);
  std::vector<cdouble> z = init.phases;
  std::vector<cdouble> u(n);

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    // u[k] = sum_m B~[k,m] conj(z[(m-k) mod N]) z[m]
    for (std::size_t k = 0; k < n; ++k) {
      cdouble acc{0.0, 0.0};
      for (std::size_t m = 0; m < n; ++m)
        acc += nb.entries(k, m) * std::conj(z[(m + n - k) % n]) * z[m];
      u[k] = acc;
    }
    const double scale = detail::max_abs(u);
    std::vector<cdouble> znew(n);
    znew[0] = cdouble(1.0, 0.0);
    for (std::size_t k = 1; k < n; ++k) znew[k] = phase(u[k], scale);

    double res2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) res2 += std::norm(znew[k] - z[k]);
    const double residual = std::sqrt(res2);

    z = znew;
    res.trace.iterates.push_back(PhaseVector{z});
    res.trace.residuals.push_back(residual);
    if (residual < tol) {
      res.trace.converged_at = iter;
      break;
    }
  }
  res.phases = PhaseVector{std::move(z)};
  return res;
}

/// Seeded i.i.d. uniform phases with entry 0 forced to 1; the random
/// baseline init for warm-start comparisons.
inline PhaseVector random_phase_init(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_phase_init: n must be at least 2");
  RngStream rng(seed, RngDomain::phase_init, 0);
  std::vector<cdouble> z(n);
  z[0] = cdouble(1.0, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * rng.next_unit();
    z[k] = cdouble(std::cos(t), std::sin(t));
  }
  return PhaseVector{std::move(z)};
}

}  // namespace mra
