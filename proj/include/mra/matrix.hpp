// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mra/core.hpp"

namespace mra {

/// Dense square complex matrix, row-major storage.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n, cdouble fill = {}) : n_(n), a_(n * n, fill) {}

  std::size_t dim() const { return n_; }

  cdouble& operator()(std::size_t r, std::size_t c) {
    assert(r < n_ && c < n_);
    return a_[r * n_ + c];
  }
  cdouble operator()(std::size_t r, std::size_t c) const {
    assert(r < n_ && c < n_);
    return a_[r * n_ + c];
  }

  cdouble* data() { return a_.data(); }
  const cdouble* data() const { return a_.data(); }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  bool operator==(const CMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }

 private:
  std::size_t n_ = 0;
  std::vector<cdouble> a_;
};

/// Circulant matrix determined by its first row: out[k1,k2] = row[(k2-k1) mod N].
inline CMatrix circulant(const std::vector<cdouble>& first_row) {
  const std::size_t n = first_row.size();
  if (n < 2) throw std::invalid_argument("circulant: need at least 2 entries");
  CMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      m(r, c) = first_row[(c + n - r) % n];
  return m;
}

inline double frobenius_norm(const CMatrix& m) {
  double s = 0.0;
  const std::size_t n = m.dim();
  for (std::size_t i = 0; i < n * n; ++i) s += std::norm(m.data()[i]);
  return std::sqrt(s);
}

inline double max_abs_entry(const CMatrix& m) {
  double best = 0.0;
  const std::size_t n = m.dim();
  for (std::size_t i = 0; i < n * n; ++i) best = std::max(best, std::abs(m.data()[i]));
  return best;
}

/// ||A - A*||_F / ||A||_F, zero for an exactly Hermitian matrix.
inline double hermitian_residual(const CMatrix& m) {
  const std::size_t n = m.dim();
  double num = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      num += std::norm(m(r, c) - std::conj(m(c, r)));
  const double den = frobenius_norm(m);
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

/// Restore exact Hermitian structure from the upper triangle.
inline void symmetrize_hermitian(CMatrix& m) {
  const std::size_t n = m.dim();
  for (std::size_t r = 0; r < n; ++r) {
    m(r, r) = cdouble(m(r, r).real(), 0.0);
    for (std::size_t c = r + 1; c < n; ++c) m(c, r) = std::conj(m(r, c));
  }
}

}  // namespace mra
