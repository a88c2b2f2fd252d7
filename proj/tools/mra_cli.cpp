// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: generate synthetic observation sets, estimate the
// shift-invariant features, invert them back to a signal, and sweep
// (sigma, M, method) grids into CSV tables.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mra/mra.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GenerateArgs {
  std::size_t n = 0;
  std::size_t m = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string signal_in;
  std::string signal_out;
};

int run_generate(const GenerateArgs& a) {
  mra::RealSignal x;
  if (!a.signal_in.empty()) {
    x = mra::read_signal_text(a.signal_in);
    if (a.n != 0 && a.n != x.size())
      throw std::runtime_error("generate: --n disagrees with the signal file length");
  } else {
    const std::size_t n = a.n == 0 ? 41 : a.n;
    x = mra::generate_gaussian_signal(n, a.seed);
  }
  const mra::ObservationSet obs = mra::generate_observations(x, a.m, a.sigma, a.seed);
  mra::write_observations(a.out, obs);
  if (!a.signal_out.empty()) mra::write_signal_text(a.signal_out, x);
  std::cout << "wrote " << a.out << " (n " << obs.n << ", m " << obs.m << ", sigma "
            << obs.sigma << ")\n";
  return 0;
}

struct EstimateArgs {
  std::string in;
  std::string out;
  bool estimate_sigma = false;
};

// Work is split into a fixed shard count so the merged result does not
// depend on the thread budget.
constexpr std::size_t kEstimateShards = 16;

int run_estimate(const EstimateArgs& a) {
  const mra::ObservationSet obs = mra::read_observations(a.in);
  const auto t0 = Clock::now();

  const std::size_t shards = std::min(kEstimateShards, obs.m);
  std::vector<mra::InvariantAccumulator> accs(shards, mra::InvariantAccumulator(obs.n));
  mra::parallel_for(0, shards, [&](std::size_t s) {
    for (std::size_t j = s; j < obs.m; j += shards) accs[s].accumulate(obs.row(j));
  });
  // pairwise merge tree, fixed shape
  std::vector<mra::InvariantAccumulator> level = std::move(accs);
  while (level.size() > 1) {
    std::vector<mra::InvariantAccumulator> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
      next.push_back(mra::InvariantAccumulator::merge(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  const mra::InvariantAccumulator& acc = level.front();

  mra::InvariantEstimates inv;
  inv.n = obs.n;
  inv.m = obs.m;
  inv.sigma = a.estimate_sigma ? acc.estimate_sigma() : obs.sigma;
  inv.mean = acc.estimate_mean();
  inv.power = acc.estimate_power_spectrum(inv.sigma);
  inv.bispectrum = acc.estimate_bispectrum();
  mra::write_invariants(a.out, inv);
  std::cout << "wrote " << a.out << " (n " << inv.n << ", m " << inv.m << ", sigma "
            << mra::detail::format_double(inv.sigma) << ", time_estimate_s "
            << mra::detail::format_double(seconds_since(t0)) << ")\n";
  return 0;
}

struct InvertArgs {
  std::string method;
  std::string in;
  std::string out;
  std::string truth;
  bool no_enforce_symmetry = false;
  std::size_t sync_max_iters = 15;
  double sync_tol = 1e-8;
  std::uint64_t init_seed = 1;
};

int run_invert(const InvertArgs& a) {
  if (a.method == "oracle")
    throw std::runtime_error(
        "invert: the known-shifts oracle needs raw observations; use the benchmark subcommand");
  const mra::InvariantEstimates inv = mra::read_invariants(a.in);
  const auto t0 = Clock::now();
  const mra::NormalizedBispectrum nb = mra::normalize_bispectrum(inv.bispectrum);
  const mra::SpectralOptions recovery_opts{!a.no_enforce_symmetry};

  mra::PhaseVector phases;
  double iterations = 0.0;
  double selected_gap = 0.0;
  std::ptrdiff_t selected_index = -1;
  if (a.method == "spectral") {
    mra::SpectralRecovery rec = mra::spectral_phase_recovery(nb, recovery_opts);
    phases = std::move(rec.phases);
    selected_index = rec.selection.selected_index;
    selected_gap = rec.selection.gaps[static_cast<std::size_t>(selected_index)];
  } else if (a.method == "fm") {
    phases = mra::frequency_marching(nb);
  } else if (a.method == "phase-sync-random") {
    const mra::PhaseVector init = mra::random_phase_init(inv.n, a.init_seed);
    mra::SyncResult sync =
        mra::iterative_phase_synchronization(nb, init, a.sync_max_iters, a.sync_tol);
    phases = std::move(sync.phases);
    iterations = static_cast<double>(sync.trace.converged_at.value_or(a.sync_max_iters));
  } else if (a.method == "phase-sync-spectral") {
    mra::SpectralRecovery rec = mra::spectral_phase_recovery(nb, recovery_opts);
    selected_index = rec.selection.selected_index;
    selected_gap = rec.selection.gaps[static_cast<std::size_t>(selected_index)];
    mra::SyncResult sync =
        mra::iterative_phase_synchronization(nb, rec.phases, a.sync_max_iters, a.sync_tol);
    phases = std::move(sync.phases);
    iterations = static_cast<double>(sync.trace.converged_at.value_or(a.sync_max_iters));
  } else {
    throw std::runtime_error("invert: unknown method '" + a.method + "'");
  }

  mra::ReconstructionResult result = mra::assemble(inv.mean, inv.power, phases, a.method);
  const double t_invert = seconds_since(t0);
  mra::write_signal_text(a.out, result.x_hat);

  std::cout << "method " << a.method << "\n";
  if (selected_index >= 0) {
    std::cout << "selected_index " << selected_index << "\n";
    std::cout << "selected_gap " << mra::detail::format_double(selected_gap) << "\n";
  }
  if (a.method == "phase-sync-random" || a.method == "phase-sync-spectral")
    std::cout << "iterations " << mra::detail::format_double(iterations) << "\n";
  std::cout << "clamped_bins " << mra::detail::format_double(result.diagnostics.at("clamped_bins"))
            << "\n";
  std::cout << "time_invert_s " << mra::detail::format_double(t_invert) << "\n";
  if (!a.truth.empty()) {
    const mra::RealSignal truth = mra::read_signal_text(a.truth);
    mra::evaluate(result, truth);
    std::cout << "rel_error " << mra::detail::format_double(*result.rel_error) << "\n";
    std::cout << "aligning_shift " << *result.aligning_shift << "\n";
  }
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

struct BenchmarkArgs {
  std::string config;
  std::string out;
  bool zero_timings = false;
};

int run_benchmark(const BenchmarkArgs& a) {
  mra::ExperimentConfig cfg = mra::load_experiment_config(a.config);
  if (a.zero_timings) cfg.zero_timings = true;
  const std::vector<mra::RunRecord> records = mra::run_experiment(cfg);
  std::ofstream f(a.out);
  if (!f) throw std::runtime_error("benchmark: cannot open '" + a.out + "'");
  mra::write_experiment_csv(f, records, cfg.trials);
  if (!f) throw std::runtime_error("benchmark: write failed for '" + a.out + "'");
  std::cout << "wrote " << a.out << " (" << records.size() << " runs)\n";
  return 0;
}

int check(bool ok, const std::string& name, int& failures) {
  std::cout << (ok ? "ok " : "FAIL ") << name << "\n";
  if (!ok) ++failures;
  return failures;
}

// Fast subset of the property suite; a smoke test for installed binaries.
int run_selftest() {
  using namespace mra;
  int failures = 0;

  {  // DFT round trip and impulse
    RealSignal x = generate_gaussian_signal(24, 3);
    auto back = idft(dft(x));
    double err = 0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(back[i] - x.samples[i]));
    check(err < 1e-10, "dft round trip", failures);
    RealSignal imp{std::vector<double>{1, 0, 0, 0}};
    auto y = dft(imp);
    bool ok = true;
    for (auto c : y.coeffs) ok = ok && std::abs(c - cdouble(1, 0)) < 1e-12;
    check(ok, "dft impulse", failures);
  }
  {  // shift-to-phase identity
    RealSignal x = generate_gaussian_signal(17, 5);
    auto y = dft(x);
    bool ok = true;
    for (std::ptrdiff_t s = 0; s < 17; ++s) {
      auto ys = dft(cyclic_shift(x, s));
      for (std::size_t k = 0; k < 17; ++k) {
        const double ang = 2.0 * std::numbers::pi * double(k) * double(s) / 17.0;
        ok = ok && std::abs(ys.coeffs[k] - y.coeffs[k] * cdouble(std::cos(ang), std::sin(ang))) < 1e-9;
      }
    }
    check(ok, "shift-to-phase identity", failures);
  }
  {  // bispectrum shift invariance
    RealSignal x = generate_gaussian_signal(15, 7);
    auto b = bispectrum(dft(x));
    bool ok = true;
    for (std::ptrdiff_t s = 1; s < 15; ++s) {
      auto bs = bispectrum(dft(cyclic_shift(x, s)));
      double num = 0;
      for (std::size_t i = 0; i < 15 * 15; ++i) num += std::norm(bs.entries.data()[i] - b.entries.data()[i]);
      ok = ok && std::sqrt(num) / frobenius_norm(b.entries) < 1e-9;
    }
    check(ok, "bispectrum shift invariance", failures);
  }
  {  // clean recovery, spectral and fm
    RealSignal x = generate_gaussian_signal(17, 11);
    const double mu = x.mean();
    for (auto& v : x.samples) v -= mu;
    auto y = dft(x);
    PowerSpectrum p;
    p.values.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) p.values[k] = std::norm(y.coeffs[k]);
    auto nb = normalize_bispectrum(bispectrum(y));
    auto rec = spectral_phase_recovery(nb);
    auto res = assemble(0.0, p, rec.phases, "spectral");
    evaluate(res, x);
    check(*res.rel_error < 1e-8, "spectral clean recovery", failures);
    auto res2 = assemble(0.0, p, frequency_marching(nb), "fm");
    evaluate(res2, x);
    check(*res2.rel_error < 1e-8, "frequency marching clean recovery", failures);
  }
  {  // merge == sequential
    RealSignal x = generate_gaussian_signal(12, 13);
    ObservationSet obs = generate_observations(x, 200, 0.5, 17);
    InvariantAccumulator whole(12), ha(12), hb(12);
    for (std::size_t j = 0; j < obs.m; ++j) {
      whole.accumulate(obs.row(j));
      (j < obs.m / 2 ? ha : hb).accumulate(obs.row(j));
    }
    auto merged = InvariantAccumulator::merge(ha, hb);
    double diff = 0;
    auto bw = whole.estimate_bispectrum(), bm = merged.estimate_bispectrum();
    for (std::size_t i = 0; i < 12 * 12; ++i)
      diff = std::max(diff, std::abs(bw.entries.data()[i] - bm.entries.data()[i]));
    check(diff <= 1e-12 * std::max(max_abs_entry(bw.entries), 1.0), "merge matches sequential",
          failures);
  }
  {  // relative_error vs exhaustive search
    RealSignal t = generate_gaussian_signal(21, 19);
    RealSignal e = generate_gaussian_signal(21, 23);
    auto fast = relative_error(t, e);
    double best = 1e300;
    std::size_t best_s = 0;
    for (std::size_t s = 0; s < 21; ++s) {
      double d2 = 0;
      for (std::size_t i = 0; i < 21; ++i) {
        const double d = e.samples[(i + s) % 21] - t.samples[i];
        d2 += d * d;
      }
      if (d2 < best) {
        best = d2;
        best_s = s;
      }
    }
    check(fast.shift == best_s && std::abs(fast.error - std::sqrt(best) / t.norm2()) < 1e-12,
          "relative_error matches exhaustive search", failures);
  }

  if (failures == 0) {
    std::cout << "selftest: all checks passed\n";
    return 0;
  }
  std::cout << "selftest: " << failures << " check(s) FAILED\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multireference alignment via shift-invariant features"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a synthetic observation set");
  cmd_gen->add_option("--n", gen.n, "Signal length (default 41; ignored with --signal-in)");
  cmd_gen->add_option("--m", gen.m, "Number of observations")->required();
  cmd_gen->add_option("--sigma", gen.sigma, "Noise standard deviation")->required();
  cmd_gen->add_option("--seed", gen.seed, "RNG seed")->default_val(0);
  cmd_gen->add_option("--out", gen.out, "Output observation file")->required();
  cmd_gen->add_option("--signal-in", gen.signal_in, "Use this signal instead of drawing one");
  cmd_gen->add_option("--signal-out", gen.signal_out, "Also write the true signal here");

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "Estimate invariants from an observation file");
  cmd_est->add_option("--in", est.in, "Observation file")->required();
  cmd_est->add_option("--out", est.out, "Output invariants file")->required();
  cmd_est->add_flag("--estimate-sigma", est.estimate_sigma,
                    "Estimate sigma from the data instead of trusting the file header");

  InvertArgs inv;
  auto* cmd_inv = app.add_subcommand("invert", "Recover a signal from an invariants file");
  cmd_inv->add_option("--method", inv.method, "spectral | fm | phase-sync-random | phase-sync-spectral")
      ->required();
  cmd_inv->add_option("--in", inv.in, "Invariants file")->required();
  cmd_inv->add_option("--out", inv.out, "Output signal file")->required();
  cmd_inv->add_option("--truth", inv.truth, "True signal file; prints the aligned relative error");
  cmd_inv->add_flag("--no-enforce-symmetry", inv.no_enforce_symmetry,
                    "Skip conjugate-symmetry enforcement of recovered phases");
  cmd_inv->add_option("--sync-max-iters", inv.sync_max_iters, "Phase-sync iteration cap")
      ->default_val(15);
  cmd_inv->add_option("--sync-tol", inv.sync_tol, "Phase-sync convergence tolerance")
      ->default_val(1e-8);
  cmd_inv->add_option("--init-seed", inv.init_seed, "Seed for phase-sync-random init")
      ->default_val(1);

  BenchmarkArgs bench;
  auto* cmd_bench = app.add_subcommand("benchmark", "Run a (sigma, M, method) sweep to CSV");
  cmd_bench->add_option("--config", bench.config, "Experiment config file")->required();
  cmd_bench->add_option("--out", bench.out, "Output CSV file")->required();
  cmd_bench->add_flag("--zero-timings", bench.zero_timings,
                      "Zero the timing columns for byte-reproducible output");

  auto* cmd_self = app.add_subcommand("selftest", "Run the fast property-check subset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_inv->parsed()) return run_invert(inv);
    if (cmd_bench->parsed()) return run_benchmark(bench);
    if (cmd_self->parsed()) return run_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
