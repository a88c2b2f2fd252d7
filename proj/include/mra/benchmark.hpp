// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mra/baselines.hpp"
#include "mra/invariants.hpp"
#include "mra/io.hpp"
#include "mra/parallel.hpp"
#include "mra/reconstruct.hpp"
#include "mra/signal.hpp"
#include "mra/simulate.hpp"
#include "mra/spectral.hpp"

namespace mra {

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {
      "fm", "oracle", "phase-sync-random", "phase-sync-spectral", "spectral"};
  return methods;
}

/// A (sigma, M, method) sweep specification. Flat key-value text format:
/// one `key value` pair per line, '#' comments, lists comma-separated.
struct ExperimentConfig {
  std::size_t n = 41;
  std::vector<std::size_t> m_grid;
  std::vector<double> sigma_grid;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::vector<std::string> methods;
  std::size_t sync_max_iters = 15;
  double sync_tol = 1e-8;
  bool enforce_symmetry = true;
  /// Reuse trial 0's signal for every trial instead of drawing fresh ones.
  bool fixed_signal = false;
  /// Write zeros to the timing columns so the CSV is byte-reproducible.
  bool zero_timings = false;
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("config: n must be at least 2");
  if (cfg.m_grid.empty()) throw std::invalid_argument("config: m grid is empty");
  if (cfg.sigma_grid.empty()) throw std::invalid_argument("config: sigma grid is empty");
  if (cfg.methods.empty()) throw std::invalid_argument("config: methods list is empty");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (cfg.sync_max_iters < 1) throw std::invalid_argument("config: sync_max_iters must be at least 1");
  if (!(cfg.sync_tol > 0.0)) throw std::invalid_argument("config: sync_tol must be positive");
  for (std::size_t m : cfg.m_grid)
    if (m < 1) throw std::invalid_argument("config: m values must be at least 1");
  for (double s : cfg.sigma_grid)
    if (s < 0.0 || !std::isfinite(s))
      throw std::invalid_argument("config: sigma values must be finite and nonnegative");
  for (const std::string& m : cfg.methods)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      throw std::invalid_argument("config: unknown method '" + m + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "': '" + v + "'");
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  cfg.methods.clear();
  std::string line;
  std::size_t lineno = 0;
  bool saw_m = false, saw_sigma = false, saw_methods = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key, value, extra;
    if (!(ss >> key)) continue;
    if (!(ss >> value) || (ss >> extra))
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key value'");
    const std::string ctx = "config line " + std::to_string(lineno) + " (" + key + ")";
    if (key == "n") {
      cfg.n = static_cast<std::size_t>(detail::parse_u64(value, ctx));
    } else if (key == "m") {
      cfg.m_grid.clear();
      for (const std::string& tok : detail::split_csv_list(value))
        cfg.m_grid.push_back(static_cast<std::size_t>(detail::parse_u64(tok, ctx)));
      saw_m = true;
    } else if (key == "sigma") {
      cfg.sigma_grid.clear();
      for (const std::string& tok : detail::split_csv_list(value))
        cfg.sigma_grid.push_back(detail::parse_double(tok, ctx));
      saw_sigma = true;
    } else if (key == "trials") {
      cfg.trials = static_cast<std::size_t>(detail::parse_u64(value, ctx));
    } else if (key == "seed") {
      cfg.seed = detail::parse_u64(value, ctx);
    } else if (key == "methods") {
      cfg.methods = detail::split_csv_list(value);
      saw_methods = true;
    } else if (key == "sync_max_iters") {
      cfg.sync_max_iters = static_cast<std::size_t>(detail::parse_u64(value, ctx));
    } else if (key == "sync_tol") {
      cfg.sync_tol = detail::parse_double(value, ctx);
    } else if (key == "enforce_symmetry") {
      cfg.enforce_symmetry = detail::parse_bool(value, key);
    } else if (key == "fixed_signal") {
      cfg.fixed_signal = detail::parse_bool(value, key);
    } else if (key == "zero_timings") {
      cfg.zero_timings = detail::parse_bool(value, key);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  if (!saw_m) throw std::invalid_argument("config: missing required key 'm'");
  if (!saw_sigma) throw std::invalid_argument("config: missing required key 'sigma'");
  if (!saw_methods) throw std::invalid_argument("config: missing required key 'methods'");
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
  return parse_experiment_config(f);
}

/// One (method, sigma, M, trial) run of the pipeline.
struct RunRecord {
  std::string method;
  double sigma = 0.0;
  std::size_t m = 0;
  std::size_t trial = 0;
  double rel_error = 0.0;
  double iterations = 0.0;
  double selected_gap = 0.0;
  double time_estimate_s = 0.0;
  double time_invert_s = 0.0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Executes the full sweep: per (sigma, M, trial) draw a signal and its
/// observations, estimate the invariants in one pass, then run every
/// requested method on the same data. Trials are scheduled in parallel but
/// every record lands in a canonical (sigma, M, method, trial) slot, so the
/// output is independent of thread count.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<std::string> methods = cfg.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  const std::size_t n_methods = methods.size();

  std::vector<double> sigmas = cfg.sigma_grid;
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());
  std::vector<std::size_t> ms = cfg.m_grid;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

  std::vector<RunRecord> records(sigmas.size() * ms.size() * n_methods * cfg.trials);
  auto slot = [&](std::size_t si, std::size_t mi, std::size_t methi, std::size_t trial) -> RunRecord& {
    return records[((si * ms.size() + mi) * n_methods + methi) * cfg.trials + trial];
  };

  const bool need_invariants =
      n_methods > 1 || methods[0] != "oracle";  // oracle-only sweeps skip estimation

  parallel_for(0, sigmas.size() * ms.size(), [&](std::size_t cell) {
    const std::size_t si = cell / ms.size();
    const std::size_t mi = cell % ms.size();
    const double sigma = sigmas[si];
    const std::size_t m = ms[mi];

    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t trial_seed = RngStream(cfg.seed, RngDomain::trial, trial).next_u64();
      const std::uint64_t signal_seed =
          cfg.fixed_signal ? RngStream(cfg.seed, RngDomain::trial, 0).next_u64() : trial_seed;
      const RealSignal x = generate_gaussian_signal(cfg.n, signal_seed);
      const ObservationSet obs = generate_observations(x, m, sigma, trial_seed);

      double t_est = 0.0;
      double mean_hat = 0.0;
      PowerSpectrum power_hat;
      NormalizedBispectrum nb;
      if (need_invariants) {
        const auto t0 = std::chrono::steady_clock::now();
        InvariantAccumulator acc(cfg.n);
        for (std::size_t j = 0; j < obs.m; ++j) acc.accumulate(obs.row(j));
        mean_hat = acc.estimate_mean();
        power_hat = acc.estimate_power_spectrum(sigma);
        nb = normalize_bispectrum(acc.estimate_bispectrum());
        t_est = detail::seconds_since(t0);
      }

      for (std::size_t methi = 0; methi < n_methods; ++methi) {
        const std::string& method = methods[methi];
        RunRecord rec;
        rec.method = method;
        rec.sigma = sigma;
        rec.m = m;
        rec.trial = trial;
        rec.time_estimate_s = t_est;

        const auto t0 = std::chrono::steady_clock::now();
        ReconstructionResult result;
        if (method == "oracle") {
          result.x_hat = known_shift_oracle(obs);
          result.method = method;
        } else if (method == "spectral") {
          const SpectralRecovery rec_sp =
              spectral_phase_recovery(nb, SpectralOptions{cfg.enforce_symmetry});
          rec.selected_gap = rec_sp.selection.gaps[static_cast<std::size_t>(rec_sp.selection.selected_index)];
          result = assemble(mean_hat, power_hat, rec_sp.phases, method);
        } else if (method == "fm") {
          result = assemble(mean_hat, power_hat, frequency_marching(nb), method);
        } else if (method == "phase-sync-random") {
          const PhaseVector init = random_phase_init(cfg.n, trial_seed);
          const SyncResult sync =
              iterative_phase_synchronization(nb, init, cfg.sync_max_iters, cfg.sync_tol);
          rec.iterations = static_cast<double>(sync.trace.converged_at.value_or(cfg.sync_max_iters));
          result = assemble(mean_hat, power_hat, sync.phases, method);
        } else {  // phase-sync-spectral
          const SpectralRecovery rec_sp =
              spectral_phase_recovery(nb, SpectralOptions{cfg.enforce_symmetry});
          rec.selected_gap = rec_sp.selection.gaps[static_cast<std::size_t>(rec_sp.selection.selected_index)];
          const SyncResult sync =
              iterative_phase_synchronization(nb, rec_sp.phases, cfg.sync_max_iters, cfg.sync_tol);
          rec.iterations = static_cast<double>(sync.trace.converged_at.value_or(cfg.sync_max_iters));
          result = assemble(mean_hat, power_hat, sync.phases, method);
        }
        rec.time_invert_s = detail::seconds_since(t0);

        evaluate(result, x);
        rec.rel_error = *result.rel_error;
        if (cfg.zero_timings) {
          rec.time_estimate_s = 0.0;
          rec.time_invert_s = 0.0;
        }
        slot(si, mi, methi, trial) = std::move(rec);
      }
    }
  });
  return records;
}

inline const char* kCsvHeader =
    "method,sigma,m,trial,rel_error,iterations,selected_gap,time_estimate_s,time_invert_s";

/// Trial rows in canonical order plus mean/std aggregate rows per
/// (sigma, M, method) group; aggregate rows carry "mean"/"std" in the trial
/// column.
inline void write_experiment_csv(std::ostream& out, const std::vector<RunRecord>& records,
                                 std::size_t trials) {
  if (trials == 0 || records.size() % trials != 0)
    throw std::invalid_argument("write_experiment_csv: record count not divisible by trials");
  out << kCsvHeader << '\n';
  auto row = [&](const RunRecord& r, const std::string& trial_label) {
    out << r.method << ',' << detail::format_double(r.sigma) << ',' << r.m << ',' << trial_label
        << ',' << detail::format_double(r.rel_error) << ',' << detail::format_double(r.iterations)
        << ',' << detail::format_double(r.selected_gap) << ','
        << detail::format_double(r.time_estimate_s) << ','
        << detail::format_double(r.time_invert_s) << '\n';
  };
  for (std::size_t g = 0; g < records.size(); g += trials) {
    for (std::size_t t = 0; t < trials; ++t) row(records[g + t], std::to_string(records[g + t].trial));

    auto aggregate = [&](auto field) {
      double mean = 0.0;
      for (std::size_t t = 0; t < trials; ++t) mean += field(records[g + t]);
      mean /= static_cast<double>(trials);
      double var = 0.0;
      if (trials > 1) {
        for (std::size_t t = 0; t < trials; ++t) {
          const double d = field(records[g + t]) - mean;
          var += d * d;
        }
        var /= static_cast<double>(trials - 1);
      }
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    const auto [e_mean, e_std] = aggregate([](const RunRecord& r) { return r.rel_error; });
    const auto [i_mean, i_std] = aggregate([](const RunRecord& r) { return r.iterations; });
    const auto [g_mean, g_std] = aggregate([](const RunRecord& r) { return r.selected_gap; });
    const auto [te_mean, te_std] = aggregate([](const RunRecord& r) { return r.time_estimate_s; });
    const auto [ti_mean, ti_std] = aggregate([](const RunRecord& r) { return r.time_invert_s; });
    RunRecord base = records[g];
    base.rel_error = e_mean;
    base.iterations = i_mean;
    base.selected_gap = g_mean;
    base.time_estimate_s = te_mean;
    base.time_invert_s = ti_mean;
    row(base, "mean");
    base.rel_error = e_std;
    base.iterations = i_std;
    base.selected_gap = g_std;
    base.time_estimate_s = te_std;
    base.time_invert_s = ti_std;
    row(base, "std");
  }
}

/// Run a config and render the CSV in one go.
inline std::string run_experiment_csv(const ExperimentConfig& cfg) {
  const std::vector<RunRecord> records = run_experiment(cfg);
  std::ostringstream out;
  write_experiment_csv(out, records, cfg.trials);
  return out.str();
}

}  // namespace mra
