// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mra/parallel.hpp"
#include "mra/rng.hpp"
#include "mra/signal.hpp"

namespace mra {

/// M noisy randomly shifted copies of a signal, plus generation metadata.
/// true_shifts is empty when ground truth is unavailable (e.g. loaded data).
struct ObservationSet {
  std::size_t n = 0;
  std::size_t m = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> data;             // m x n, row-major
  std::vector<std::uint32_t> true_shifts;

  bool has_shifts() const { return !true_shifts.empty(); }

  std::span<const double> row(std::size_t j) const {
    return std::span<const double>(data).subspan(j * n, n);
  }
};

/// N i.i.d. standard normal samples, reproducible per seed.
inline RealSignal generate_gaussian_signal(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_gaussian_signal: n must be at least 2");
  RngStream rng(seed, RngDomain::signal, 0);
  std::vector<double> samples(n);
  for (double& v : samples) v = rng.next_gaussian();
  return RealSignal{std::move(samples)};
}

/// Observation j is R_{s_j} x + sigma * eps_j with s_j uniform on [0, N) and
/// eps_j standard normal. Each observation draws from its own RNG stream, so
/// the output is bit-identical regardless of thread count.
inline ObservationSet generate_observations(const RealSignal& x, std::size_t m, double sigma,
                                            std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("generate_observations: m must be at least 1");
  if (sigma < 0.0 || !std::isfinite(sigma))
    throw std::invalid_argument("generate_observations: sigma must be finite and nonnegative");
  const std::size_t n = x.size();
  ObservationSet obs;
  obs.n = n;
  obs.m = m;
  obs.sigma = sigma;
  obs.seed = seed;
  obs.data.resize(m * n);
  obs.true_shifts.resize(m);
  parallel_for(0, m, [&](std::size_t j) {
    RngStream rng(seed, RngDomain::observation, j);
    const std::uint32_t s = rng.next_below(static_cast<std::uint32_t>(n));
    obs.true_shifts[j] = s;
    double* row = obs.data.data() + j * n;
    for (std::size_t i = 0; i < n; ++i)
      row[i] = x.samples[(i + s) % n] + sigma * rng.next_gaussian();
  });
  return obs;
}

/// Unshift each observation by its recorded shift and average. Alignment is
/// perfect by construction, so the residual error is noise only; this lower
/// bound is the natural baseline for every inversion method.
inline RealSignal known_shift_oracle(const ObservationSet& obs) {
  if (!obs.has_shifts())
    throw std::invalid_argument("known_shift_oracle: true shifts are not available");
  if (obs.m < 1) throw std::invalid_argument("known_shift_oracle: empty observation set");
  const std::size_t n = obs.n;
  std::vector<double> acc(n, 0.0);
  for (std::size_t j = 0; j < obs.m; ++j) {
    const double* row = obs.data.data() + j * n;
    const std::size_t s = obs.true_shifts[j] % n;
    // (R_{-s} xi)[i] = xi[(i - s) mod n]
    for (std::size_t i = 0; i < n; ++i) acc[i] += row[(i + n - s) % n];
  }
  const double inv_m = 1.0 / static_cast<double>(obs.m);
  for (double& v : acc) v *= inv_m;
  return RealSignal{std::move(acc)};
}

}  // namespace mra
