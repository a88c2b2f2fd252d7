// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mra/matrix.hpp"
#include "mra/signal.hpp"

namespace mra {

/// Result of a Hermitian eigendecomposition plus the gap-based selection
/// state. Eigenvalues are sorted descending; column i of `eigenvectors`
/// pairs with eigenvalues[i]. `sort_permutation[i]` is the pre-sort position
/// of the i-th sorted eigenvalue. `selected_index` is 0-based and -1 until
/// select_eigenvector() runs.
struct EigenSelection {
  std::vector<double> eigenvalues;
  CMatrix eigenvectors;
  std::vector<double> gaps;
  std::vector<std::size_t> sort_permutation;
  std::ptrdiff_t selected_index = -1;
};

namespace detail {

/// Cyclic Jacobi for complex Hermitian matrices. Each rotation
/// U = [[c, -s e^{i phi}], [s e^{-i phi}, c]] with phi = arg(a_pq) and
/// tan(2 theta) = 2 |a_pq| / (a_pp - a_qq) annihilates one off-diagonal
/// pair; sweeps repeat until the off-diagonal mass is at rounding level.
/// Plenty for N up to a few hundred, and the accumulated eigenvectors come
/// out orthonormal to machine precision.
inline void jacobi_hermitian(CMatrix& a, CMatrix& v, std::vector<double>& eigenvalues) {
  const std::size_t n = a.dim();
  v = CMatrix::identity(n);
  const double anorm = frobenius_norm(a);
  const double off_tol = 1e-14 * std::max(anorm, 1e-300);
  constexpr int kMaxSweeps = 64;

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    off = std::sqrt(2.0 * off);
    if (off <= off_tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cdouble apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (app - aqq) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cdouble eip = apq / mag;            // e^{i phi}
        const cdouble se_m = s * std::conj(eip);  // s e^{-i phi}
        const cdouble se_p = s * eip;             // s e^{+i phi}

        a(p, p) = cdouble(app + t * mag, 0.0);
        a(q, q) = cdouble(aqq - t * mag, 0.0);
        a(p, q) = cdouble(0.0, 0.0);
        a(q, p) = cdouble(0.0, 0.0);

        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const cdouble arp = a(r, p);
          const cdouble arq = a(r, q);
          const cdouble new_rp = c * arp + se_m * arq;
          const cdouble new_rq = -se_p * arp + c * arq;
          a(r, p) = new_rp;
          a(r, q) = new_rq;
          a(p, r) = std::conj(new_rp);
          a(q, r) = std::conj(new_rq);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cdouble vrp = v(r, p);
          const cdouble vrq = v(r, q);
          v(r, p) = c * vrp + se_m * vrq;
          v(r, q) = -se_p * vrp + c * vrq;
        }
      }
    }
  }
  if (sweep >= kMaxSweeps)
    throw std::runtime_error("hermitian_eig: Jacobi failed to converge after " +
                             std::to_string(kMaxSweeps) + " sweeps");

  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i).real();
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Gaps and selection are filled by the later pipeline
/// stages.
inline EigenSelection hermitian_eig(const CMatrix& matrix) {
  const std::size_t n = matrix.dim();
  if (n < 2) throw std::invalid_argument("hermitian_eig: matrix must be at least 2x2");
  if (hermitian_residual(matrix) > 1e-10)
    throw std::invalid_argument("hermitian_eig: input is not Hermitian");

  CMatrix work = matrix;
  CMatrix vectors;
  std::vector<double> values;
  detail::jacobi_hermitian(work, vectors, values);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });

  EigenSelection out;
  out.eigenvalues.resize(n);
  out.eigenvectors = CMatrix(n);
  out.sort_permutation = perm;
  for (std::size_t i = 0; i < n; ++i) {
    out.eigenvalues[i] = values[perm[i]];
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, i) = vectors(r, perm[i]);
  }
  return out;
}

inline EigenSelection hermitian_eig(const NormalizedBispectrum& nb) {
  return hermitian_eig(nb.entries);
}

/// Minimum spectral gap of each sorted eigenvalue:
/// interior Delta_i = min(lambda_{i-1} - lambda_i, lambda_i - lambda_{i+1}),
/// end points use their single neighbor.
inline std::vector<double> spectral_gaps(const std::vector<double>& sorted_desc) {
  const std::size_t n = sorted_desc.size();
  if (n < 2) throw std::invalid_argument("spectral_gaps: need at least 2 eigenvalues");
  for (std::size_t i = 1; i < n; ++i)
    if (sorted_desc[i - 1] < sorted_desc[i])
      throw std::invalid_argument("spectral_gaps: eigenvalues are not sorted descending");
  std::vector<double> gaps(n);
  gaps[0] = sorted_desc[0] - sorted_desc[1];
  gaps[n - 1] = sorted_desc[n - 2] - sorted_desc[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i)
    gaps[i] = std::min(sorted_desc[i - 1] - sorted_desc[i], sorted_desc[i] - sorted_desc[i + 1]);
  return gaps;
}

/// Picks the eigenvector with the largest minimum spectral gap (exact ties:
/// larger |eigenvalue|, then smaller index), pins its DC entry to 1 and
/// projects onto unit-modulus phases. Records the choice in eig.
inline PhaseVector select_eigenvector(EigenSelection& eig) {
  const std::size_t n = eig.eigenvalues.size();
  if (eig.gaps.size() != n)
    throw std::logic_error("select_eigenvector: spectral gaps not computed");

  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (eig.gaps[i] > eig.gaps[best] ||
        (eig.gaps[i] == eig.gaps[best] &&
         std::abs(eig.eigenvalues[i]) > std::abs(eig.eigenvalues[best])))
      best = i;
  }
  eig.selected_index = static_cast<std::ptrdiff_t>(best);

  std::vector<cdouble> v(n);
  double vmax = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    v[r] = eig.eigenvectors(r, best);
    vmax = std::max(vmax, std::abs(v[r]));
  }

  // Dividing by v[0] removes the eigensolver's arbitrary global phase. If
  // v[0] is numerically zero (heavy noise; never the clean case, where
  // |v[0]| = 1/sqrt(N)) normalize by the largest entry instead and rotate
  // entry 0 to the positive real axis.
  if (std::abs(v[0]) > kPhaseZeroTol * vmax) {
    const cdouble pivot = v[0];
    for (auto& z : v) z /= pivot;
  } else {
    std::size_t jmax = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v[r]) > std::abs(v[jmax])) jmax = r;
    const cdouble pivot = v[jmax];
    for (auto& z : v) z /= pivot;
    const cdouble g = std::conj(phase(v[0], detail::max_abs(v)));
    for (auto& z : v) z *= g;
  }
  v[0] = cdouble(1.0, 0.0);

  const double scale = detail::max_abs(v);
  PhaseVector out;
  out.phases.resize(n);
  out.phases[0] = cdouble(1.0, 0.0);
  for (std::size_t k = 1; k < n; ++k) out.phases[k] = phase(v[k], scale);
  return out;
}

struct SpectralOptions {
  /// Post-process the recovered phases with y[k] <- phase(y[k] + conj(y[N-k])):
  /// the truth satisfies conjugate symmetry for real signals, so averaging the
  /// redundant pair denoises. Off when validating the bare algorithm.
  bool enforce_conjugate_symmetry = true;
};

struct SpectralRecovery {
  PhaseVector phases;
  EigenSelection selection;
};

/// Mirror-pair phase averaging; entry 0 is left at 1.
inline void enforce_phase_conjugate_symmetry(PhaseVector& p) {
  const std::size_t n = p.size();
  for (std::size_t k = 1; 2 * k <= n; ++k) {
    const std::size_t km = (n - k) % n;
    if (km == k) {  // even N midpoint: must be real
      p.phases[k] = phase(cdouble(p.phases[k].real(), 0.0));
      continue;
    }
    const cdouble avg = phase(p.phases[k] + std::conj(p.phases[km]));
    p.phases[k] = avg;
    p.phases[km] = std::conj(avg);
  }
}

/// Full spectral inverter: eigendecompose the normalized bispectrum, score
/// eigenvalues by minimum spectral gap, read the phases off the winning
/// eigenvector. O(N^3), dominated by the eigendecomposition.
inline SpectralRecovery spectral_phase_recovery(const NormalizedBispectrum& nb,
                                                const SpectralOptions& opts = {}) {
  SpectralRecovery rec;
  rec.selection = hermitian_eig(nb);
  rec.selection.gaps = spectral_gaps(rec.selection.eigenvalues);
  rec.phases = select_eigenvector(rec.selection);
  if (opts.enforce_conjugate_symmetry) enforce_phase_conjugate_symmetry(rec.phases);
  return rec;
}

}  // namespace mra
