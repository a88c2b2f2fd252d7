// SPDX-License-Identifier: Apache-2.0
//
// End-to-end runs of the CLI binary. The binary path arrives through the
// MRA_CLI environment variable (set by ctest).
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* cli_path() { return std::getenv("MRA_CLI"); }

CommandResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(cli_path()) + " " + args + " > " + out.string() + " 2> " +
                          err.string();
  const int raw = std::system(cmd.c_str());
  CommandResult res;
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = read_file(out);
  res.err = read_file(err);
  return res;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mra_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

double parse_key(const std::string& text, const std::string& key) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream ss(line);
    std::string k, v;
    if (ss >> k >> v && k == key) return mra::detail::parse_double(v, "cli output");
  }
  FAIL("key '" << key << "' not found in CLI output:\n" << text);
  return 0.0;
}

}  // namespace

TEST_CASE("cli pipeline: generate, estimate, invert", "[cli]") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  const std::string obs = (dir.path / "obs.mra").string();
  const std::string inv = (dir.path / "inv.txt").string();
  const std::string truth = (dir.path / "truth.txt").string();

  // clean data end to end: both inverters must recover the signal
  auto gen = run_cli("generate --n 41 --m 200 --sigma 0 --seed 42 --out " + obs +
                         " --signal-out " + truth,
                     dir.path);
  REQUIRE(gen.status == 0);
  auto est = run_cli("estimate --in " + obs + " --out " + inv, dir.path);
  REQUIRE(est.status == 0);

  const std::string xhat_spec = (dir.path / "xhat_spectral.txt").string();
  auto inv_spec = run_cli("invert --method spectral --in " + inv + " --out " + xhat_spec +
                              " --truth " + truth,
                          dir.path);
  REQUIRE(inv_spec.status == 0);
  CHECK(count_lines(read_file(xhat_spec)) == 41);
  const double err_spec = parse_key(inv_spec.out, "rel_error");
  CHECK(err_spec < 1e-8);

  const std::string xhat_fm = (dir.path / "xhat_fm.txt").string();
  auto inv_fm = run_cli("invert --method fm --in " + inv + " --out " + xhat_fm + " --truth " +
                            truth,
                        dir.path);
  REQUIRE(inv_fm.status == 0);
  const double err_fm = parse_key(inv_fm.out, "rel_error");
  CHECK(err_fm < 1e-8);
  CHECK(std::abs(err_fm - err_spec) < 1e-8);  // clean-case equivalence

  // the written estimate is a valid signal file (round trip through truth slot)
  const mra::RealSignal xhat = mra::read_signal_text(xhat_spec);
  CHECK(xhat.size() == 41);
}

TEST_CASE("cli invert supports the phase-sync methods", "[cli]") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  const std::string obs = (dir.path / "obs.mra").string();
  const std::string inv = (dir.path / "inv.txt").string();
  const std::string truth = (dir.path / "truth.txt").string();
  REQUIRE(run_cli("generate --n 21 --m 500 --sigma 0.5 --seed 3 --out " + obs + " --signal-out " +
                      truth,
                  dir.path)
              .status == 0);
  REQUIRE(run_cli("estimate --in " + obs + " --out " + inv, dir.path).status == 0);

  const std::string xhat = (dir.path / "xhat.txt").string();
  auto res = run_cli("invert --method phase-sync-spectral --in " + inv + " --out " + xhat +
                         " --truth " + truth,
                     dir.path);
  REQUIRE(res.status == 0);
  CHECK(parse_key(res.out, "iterations") >= 1.0);
  CHECK(parse_key(res.out, "rel_error") < 1.0);

  auto res2 = run_cli("invert --method phase-sync-random --init-seed 9 --in " + inv + " --out " +
                          xhat,
                      dir.path);
  REQUIRE(res2.status == 0);
}

TEST_CASE("cli benchmark writes the pinned CSV schema", "[cli]") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  const fs::path cfg_path = dir.path / "sweep.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "n 17\nm 100\nsigma 0,0.5\ntrials 2\nseed 5\nmethods spectral,oracle\n";
  }
  const std::string csv_path = (dir.path / "out.csv").string();
  auto res = run_cli("benchmark --config " + cfg_path.string() + " --out " + csv_path +
                         " --zero-timings",
                     dir.path);
  REQUIRE(res.status == 0);
  const std::string csv = read_file(csv_path);
  CHECK(csv.rfind("method,sigma,m,trial,rel_error,iterations,selected_gap,time_estimate_s,"
                  "time_invert_s\n",
                  0) == 0);
  // byte-identical on a second run
  const std::string csv2_path = (dir.path / "out2.csv").string();
  REQUIRE(run_cli("benchmark --config " + cfg_path.string() + " --out " + csv2_path +
                      " --zero-timings",
                  dir.path)
              .status == 0);
  CHECK(read_file(csv2_path) == csv);
}

TEST_CASE("cli selftest passes", "[cli]") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;
  auto res = run_cli("selftest", dir.path);
  CHECK(res.status == 0);
  CHECK(res.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("cli error handling and exit codes", "[cli]") {
  REQUIRE(cli_path() != nullptr);
  TempDir dir;

  auto unknown = run_cli("frobnicate", dir.path);
  CHECK(unknown.status == 2);

  auto badflag = run_cli("generate --frobnicate 1", dir.path);
  CHECK(badflag.status == 2);

  auto help = run_cli("--help", dir.path);
  CHECK(help.status == 0);
  CHECK(help.out.find("generate") != std::string::npos);

  auto missing = run_cli("estimate --in " + (dir.path / "nope.mra").string() + " --out " +
                             (dir.path / "inv.txt").string(),
                         dir.path);
  CHECK(missing.status == 1);
  CHECK(missing.err.rfind("error:", 0) == 0);

  auto oracle = run_cli("invert --method oracle --in x --out y", dir.path);
  CHECK(oracle.status == 1);
  CHECK(oracle.err.find("benchmark") != std::string::npos);
}
