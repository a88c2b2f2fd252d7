// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mra/core.hpp"

namespace mra {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

/// Precomputed transform plan for one length. Forward is the unnormalized
/// DFT, X[k] = sum_n x[n] e^{-2 pi i n k / N}; inverse carries the 1/N.
/// Power-of-two lengths run radix-2 in place; everything else goes through
/// Bluestein's chirp convolution. apply() is const and safe to share across
/// threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n < 1) throw std::invalid_argument("FftPlan: length must be positive");
    if (detail::is_pow2(n_)) {
      conv_len_ = n_;
      init_pow2_tables(conv_len_);
    } else {
      conv_len_ = detail::next_pow2(2 * n_ - 1);
      init_pow2_tables(conv_len_);
      init_bluestein();
    }
  }

  std::size_t length() const { return n_; }

  void forward(std::vector<cdouble>& x) const {
    if (x.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
    if (detail::is_pow2(n_)) {
      pow2_transform(x.data(), false);
    } else {
      bluestein(x);
    }
  }

  void inverse(std::vector<cdouble>& x) const {
    if (x.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
    for (auto& v : x) v = std::conj(v);
    forward(x);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : x) v = std::conj(v) * scale;
  }

 private:
  void init_pow2_tables(std::size_t len) {
    twiddle_.resize(len / 2);
    for (std::size_t j = 0; j < len / 2; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(len);
      twiddle_[j] = cdouble(std::cos(ang), std::sin(ang));
    }
    bitrev_.resize(len);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < len) ++bits;
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      bitrev_[i] = r;
    }
  }

  void init_bluestein() {
    // chirp c[m] = e^{-i pi m^2 / N}; m^2 reduced mod 2N keeps the angle exact
    chirp_.resize(n_);
    for (std::size_t m = 0; m < n_; ++m) {
      const std::uint64_t sq = (static_cast<std::uint64_t>(m) * m) % (2 * n_);
      const double ang = -std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n_);
      chirp_[m] = cdouble(std::cos(ang), std::sin(ang));
    }
    std::vector<cdouble> b(conv_len_, cdouble{});
    b[0] = std::conj(chirp_[0]);
    for (std::size_t m = 1; m < n_; ++m) {
      b[m] = std::conj(chirp_[m]);
      b[conv_len_ - m] = std::conj(chirp_[m]);
    }
    pow2_transform(b.data(), false);
    chirp_fft_ = std::move(b);
  }

  // in-place radix-2, length == conv_len_; no scaling on either direction
  void pow2_transform(cdouble* a, bool inverse) const {
    const std::size_t len = twiddle_.size() * 2;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t j = bitrev_[i];
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t half = 1; half < len; half <<= 1) {
      const std::size_t step = twiddle_.size() / half;
      for (std::size_t base = 0; base < len; base += 2 * half) {
        for (std::size_t j = 0; j < half; ++j) {
          cdouble w = twiddle_[j * step];
          if (inverse) w = std::conj(w);
          const cdouble u = a[base + j];
          const cdouble v = a[base + j + half] * w;
          a[base + j] = u + v;
          a[base + j + half] = u - v;
        }
      }
    }
  }

  void bluestein(std::vector<cdouble>& x) const {
    std::vector<cdouble> a(conv_len_, cdouble{});
    for (std::size_t m = 0; m < n_; ++m) a[m] = x[m] * chirp_[m];
    pow2_transform(a.data(), false);
    for (std::size_t i = 0; i < conv_len_; ++i) a[i] *= chirp_fft_[i];
    pow2_transform(a.data(), true);
    const double scale = 1.0 / static_cast<double>(conv_len_);
    for (std::size_t k = 0; k < n_; ++k) x[k] = chirp_[k] * a[k] * scale;
  }

  std::size_t n_ = 0;
  std::size_t conv_len_ = 0;
  std::vector<cdouble> twiddle_;       // for conv_len_
  std::vector<std::size_t> bitrev_;    // for conv_len_
  std::vector<cdouble> chirp_;         // Bluestein only
  std::vector<cdouble> chirp_fft_;     // Bluestein only
};

/// One-shot unnormalized forward transform.
inline std::vector<cdouble> fft(std::vector<cdouble> x) {
  FftPlan plan(x.size());
  plan.forward(x);
  return x;
}

/// One-shot inverse transform (carries the 1/N).
inline std::vector<cdouble> ifft(std::vector<cdouble> x) {
  FftPlan plan(x.size());
  plan.inverse(x);
  return x;
}

}  // namespace mra
