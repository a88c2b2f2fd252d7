// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mra/fft.hpp"
#include "mra/matrix.hpp"
#include "mra/signal.hpp"

namespace mra {

/// |y[k]|^2 estimates; entries may dip below zero after bias correction.
struct PowerSpectrum {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
};

/// One-pass, mergeable running sums for the three shift-invariant features
/// (mean, power spectrum, bispectrum) plus the noise-variance estimator.
/// accumulate() is O(N^2) per observation and the state is O(N^2) regardless
/// of how many observations pass through. Single-writer; shard observations
/// across accumulators and merge() for parallel estimation.
class InvariantAccumulator {
 public:
  struct Options {
    /// Also accumulate the bispectrum WITHOUT per-observation DC removal.
    /// Diagnostic path: its expectation carries the additive noise bias
    /// N sigma^2 y[0] on the diagonal and border, which the default
    /// mean-subtracted estimator cancels.
    bool track_raw_bispectrum = false;
  };

  explicit InvariantAccumulator(std::size_t n) : InvariantAccumulator(n, Options{}) {}

  InvariantAccumulator(std::size_t n, Options opts)
      : n_(n),
        opts_(opts),
        sum_power_(n, 0.0),
        sum_bispec_(n),
        sum_raw_bispec_(opts.track_raw_bispectrum ? n : 0),
        plan_(n),
        scratch_(n) {
    if (n < 2) throw std::invalid_argument("InvariantAccumulator: n must be at least 2");
  }

  std::size_t length() const { return n_; }
  std::uint64_t count() const { return count_; }
  const Options& options() const { return opts_; }

  void accumulate(std::span<const double> row) {
    if (row.size() != n_)
      throw std::invalid_argument("InvariantAccumulator: observation length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      scratch_[i] = cdouble(row[i], 0.0);
      sum += row[i];
    }
    ++count_;
    sum_sums_ += sum;
    sum_sq_sums_ += sum * sum;

    plan_.forward(scratch_);
    for (std::size_t k = 0; k < n_; ++k) sum_power_[k] += std::norm(scratch_[k]);

    // Bispectrum contribution of the mean-subtracted observation. Removing
    // the per-observation mean only changes DFT bin 0, so zeroing that bin
    // is the subtraction. Conjugate symmetry is restored first so each
    // added term keeps the running sum exactly Hermitian.
    detail::enforce_conjugate_symmetry(scratch_);
    if (opts_.track_raw_bispectrum) add_bispectrum_terms(sum_raw_bispec_, scratch_);
    scratch_[0] = cdouble(0.0, 0.0);
    add_bispectrum_terms(sum_bispec_, scratch_);
  }

  void accumulate(const RealSignal& row) { accumulate(std::span<const double>(row.samples)); }

  /// Fieldwise sum of two accumulators. Estimates from merge(a, b) match a
  /// single sequential pass over the union to 1e-12 relative.
  static InvariantAccumulator merge(const InvariantAccumulator& a, const InvariantAccumulator& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("merge: accumulator dimensions differ");
    if (a.opts_.track_raw_bispectrum != b.opts_.track_raw_bispectrum)
      throw std::invalid_argument("merge: accumulator options differ");
    InvariantAccumulator out = a;
    out.count_ += b.count_;
    out.sum_sums_ += b.sum_sums_;
    out.sum_sq_sums_ += b.sum_sq_sums_;
    for (std::size_t k = 0; k < out.n_; ++k) out.sum_power_[k] += b.sum_power_[k];
    add_matrix(out.sum_bispec_, b.sum_bispec_);
    if (out.opts_.track_raw_bispectrum) add_matrix(out.sum_raw_bispec_, b.sum_raw_bispec_);
    return out;
  }

  /// Mean of the per-observation means; unbiased for the signal mean with
  /// variance sigma^2 / (N M).
  double estimate_mean() const {
    require_count(1, "estimate_mean");
    return sum_sums_ / (static_cast<double>(n_) * static_cast<double>(count_));
  }

  /// sigma_hat^2 = Var_j(sum_n xi_j[n]) / N, unbiased sample variance over
  /// observations. The per-observation sum sees the full noise variance
  /// N sigma^2 while the shifted signal contributes a constant. Variances
  /// below the rounding floor of the two-moment formula report exactly zero
  /// (noiseless data would otherwise surface summation-order jitter).
  double estimate_sigma() const {
    require_count(2, "estimate_sigma");
    const double m = static_cast<double>(count_);
    double var = (sum_sq_sums_ - sum_sums_ * sum_sums_ / m) / (m - 1.0);
    if (var <= 1e-12 * (sum_sq_sums_ / m)) var = 0.0;
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n_));
  }

  /// P_hat[k] = mean_j |DFT(xi_j)[k]|^2 - N sigma^2, symmetrized across the
  /// k / N-k pair (the truth is symmetric for real signals). Entries may be
  /// negative; clamping is the reconstruction step's decision.
  PowerSpectrum estimate_power_spectrum(double sigma) const {
    require_count(1, "estimate_power_spectrum");
    if (sigma < 0.0 || !std::isfinite(sigma))
      throw std::invalid_argument("estimate_power_spectrum: bad sigma");
    const double m = static_cast<double>(count_);
    const double bias = static_cast<double>(n_) * sigma * sigma;
    std::vector<double> p(n_);
    for (std::size_t k = 0; k < n_; ++k) p[k] = sum_power_[k] / m - bias;
    for (std::size_t k = 1; 2 * k < n_; ++k) {
      const double avg = 0.5 * (p[k] + p[n_ - k]);
      p[k] = avg;
      p[n_ - k] = avg;
    }
    return PowerSpectrum{std::move(p)};
  }

  /// Mean of per-observation mean-subtracted bispectra; consistent for the
  /// bispectrum of x - mu_x without needing sigma.
  BispectrumMatrix estimate_bispectrum() const {
    require_count(1, "estimate_bispectrum");
    return BispectrumMatrix{scaled(sum_bispec_, 1.0 / static_cast<double>(count_))};
  }

  /// Diagnostic: mean bispectrum WITHOUT DC removal (requires the option).
  BispectrumMatrix estimate_raw_bispectrum() const {
    if (!opts_.track_raw_bispectrum)
      throw std::logic_error("estimate_raw_bispectrum: raw tracking not enabled");
    require_count(1, "estimate_raw_bispectrum");
    return BispectrumMatrix{scaled(sum_raw_bispec_, 1.0 / static_cast<double>(count_))};
  }

 private:
  void require_count(std::uint64_t minimum, const char* what) const {
    if (count_ < minimum)
      throw std::runtime_error(std::string(what) + ": accumulator has too few observations");
  }

  static void add_matrix(CMatrix& dst, const CMatrix& src) {
    const std::size_t total = dst.dim() * dst.dim();
    for (std::size_t i = 0; i < total; ++i) dst.data()[i] += src.data()[i];
  }

  static CMatrix scaled(const CMatrix& m, double factor) {
    CMatrix out = m;
    const std::size_t total = out.dim() * out.dim();
    for (std::size_t i = 0; i < total; ++i) out.data()[i] *= factor;
    return out;
  }

  /// Upper-triangle accumulation with mirrored conjugates; z must be exactly
  /// conjugate-symmetric so every term (and thus the sum) stays Hermitian.
  static void add_bispectrum_terms(CMatrix& dst, const std::vector<cdouble>& z) {
    const std::size_t n = z.size();
    for (std::size_t k1 = 0; k1 < n; ++k1) {
      dst(k1, k1) += cdouble(std::norm(z[k1]) * z[0].real(), 0.0);
      for (std::size_t k2 = k1 + 1; k2 < n; ++k2) {
        const cdouble v = z[k1] * std::conj(z[k2]) * z[k2 - k1];
        dst(k1, k2) += v;
        dst(k2, k1) += std::conj(v);
      }
    }
  }

  std::size_t n_ = 0;
  Options opts_;
  std::uint64_t count_ = 0;
  double sum_sums_ = 0.0;     // sum over j of S_j = sum_n xi_j[n]
  double sum_sq_sums_ = 0.0;  // sum over j of S_j^2
  std::vector<double> sum_power_;
  CMatrix sum_bispec_;
  CMatrix sum_raw_bispec_;
  FftPlan plan_;
  std::vector<cdouble> scratch_;
};

}  // namespace mra
