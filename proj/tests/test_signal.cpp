// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace mra;
using testutil::direct_dft;
using testutil::exhaustive_relative_error;
using testutil::random_signal;

TEST_CASE("dft of an impulse is all ones", "[signal]") {
  const RealSignal x{std::vector<double>{1, 0, 0, 0}};
  const FourierCoeffs y = dft(x);
  REQUIRE(y.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(y[k] - cdouble(1, 0)) < 1e-14);
}

TEST_CASE("dft of a constant concentrates in bin 0", "[signal]") {
  const double c = 0.75;
  const RealSignal x{std::vector<double>(4, c)};
  const FourierCoeffs y = dft(x);
  CHECK(std::abs(y[0] - cdouble(4 * c, 0)) < 1e-14);
  for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(y[k]) < 1e-14);
}

TEST_CASE("dft matches direct summation", "[signal]") {
  const RealSignal x = random_signal(5, 42);
  const FourierCoeffs y = dft(x);
  const auto oracle = direct_dft(x.samples);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(y[k] - oracle[k]) < 1e-12);
}

TEST_CASE("dft of a real signal is conjugate-symmetric with a real DC bin", "[signal]") {
  for (std::size_t n : {5ul, 41ul, 64ul}) {
    const RealSignal x = random_signal(n, 4000 + n);
    const FourierCoeffs y = dft(x);
    double scale = 0.0;
    for (cdouble z : y.coeffs) scale = std::max(scale, std::abs(z));
    CHECK(std::abs(y[0].imag()) < 1e-12 * scale);
    for (std::size_t k = 1; k < n; ++k)
      REQUIRE(std::abs(y[k] - std::conj(y[(n - k) % n])) < 1e-12 * scale);
  }
}

TEST_CASE("dft rejects length below 2", "[signal]") {
  CHECK_THROWS_AS(RealSignal{std::vector<double>{1.0}}, std::invalid_argument);
}

TEST_CASE("idft(dft(x)) round trip across lengths", "[signal]") {
  // 1000 random signals, N in [2, 128]
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 127;
    const RealSignal x = random_signal(n, gen());
    const auto back = idft(dft(x));
    double sup = 0.0, err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sup = std::max(sup, std::abs(x.samples[i]));
      err = std::max(err, std::abs(back[i] - x.samples[i]));
    }
    REQUIRE(err < 1e-10 * std::max(sup, 1.0));
  }
}

TEST_CASE("cyclic shift by 0 and by N are the identity", "[signal]") {
  const RealSignal x = random_signal(9, 1);
  CHECK(cyclic_shift(x, 0) == x);
  CHECK(cyclic_shift(x, 9) == x);
  CHECK(cyclic_shift(x, -9) == x);
}

TEST_CASE("cyclic shift moves samples forward", "[signal]") {
  const RealSignal x{std::vector<double>{1, 2, 3, 4, 5}};
  // out[n] = in[(n+2) mod 5] -> (3,4,5,1,2)
  const RealSignal shifted = cyclic_shift(x, 2);
  CHECK(shifted.samples == std::vector<double>{3, 4, 5, 1, 2});
}

TEST_CASE("shifting multiplies DFT bins by a pure phase", "[signal]") {
  for (std::size_t n : {2ul, 3ul, 8ul, 41ul, 64ul}) {
    const RealSignal x = random_signal(n, 100 + n);
    const FourierCoeffs y = dft(x);
    for (std::size_t s = 0; s < n; ++s) {
      const FourierCoeffs ys = dft(cyclic_shift(x, static_cast<std::ptrdiff_t>(s)));
      for (std::size_t k = 0; k < n; ++k) {
        const double ang = 2.0 * std::numbers::pi * double(k) * double(s) / double(n);
        const cdouble expected = y[k] * cdouble(std::cos(ang), std::sin(ang));
        REQUIRE(std::abs(ys[k] - expected) < 1e-10 * std::max(1.0, std::abs(y[k])));
      }
    }
  }
}

TEST_CASE("phase convention", "[signal]") {
  CHECK(phase(cdouble(0, 0)) == cdouble(1, 0));           // zero maps to 1
  CHECK(phase(cdouble(-2, 0)) == cdouble(-1, 0));
  CHECK(std::abs(phase(cdouble(3, 4)) - cdouble(0.6, 0.8)) < 1e-15);  // |3+4i| = 5
  CHECK(std::abs(phase(cdouble(1e-13, 0), 1.0) - cdouble(1, 0)) < 1e-15);  // below threshold
  CHECK_THROWS_AS(phase(cdouble(std::nan(""), 0)), std::invalid_argument);
  CHECK_THROWS_AS(phase(cdouble(0, std::numeric_limits<double>::infinity())),
                  std::invalid_argument);
}

TEST_CASE("circulant layout", "[signal]") {
  const CMatrix m = circulant({cdouble(1, 0), cdouble(2, 0)});
  CHECK(m(0, 0) == cdouble(1, 0));
  CHECK(m(0, 1) == cdouble(2, 0));
  CHECK(m(1, 0) == cdouble(2, 0));
  CHECK(m(1, 1) == cdouble(1, 0));

  const CMatrix ones = circulant(std::vector<cdouble>(5, cdouble(1, 0)));
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) CHECK(ones(r, c) == cdouble(1, 0));

  // entry [1,3] picks first_row[(3-1) mod 4]
  const std::vector<cdouble> row{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK(circulant(row)(1, 3) == row[2]);
}

TEST_CASE("bispectrum of an impulse is the all-ones matrix", "[signal]") {
  const RealSignal x{std::vector<double>{1, 0, 0, 0}};
  const BispectrumMatrix b = bispectrum(dft(x));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(b.entries(r, c) - cdouble(1, 0)) < 1e-13);
}

TEST_CASE("bispectrum of a constant has a single corner entry", "[signal]") {
  const double c = 0.5;
  const BispectrumMatrix b = bispectrum(dft(RealSignal{std::vector<double>(4, c)}));
  // y = (4c, 0, 0, 0) so B[0,0] = (4c)^3 = 64 c^3
  CHECK(std::abs(b.entries(0, 0) - cdouble(64 * c * c * c, 0)) < 1e-12);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t col = 0; col < 4; ++col)
      if (r != 0 || col != 0) CHECK(std::abs(b.entries(r, col)) < 1e-12);
}

TEST_CASE("bispectrum triple products match the Hadamard matrix form", "[signal]") {
  // B = (y y*) o C(y), entrywise
  const RealSignal x = random_signal(5, 77);
  const FourierCoeffs y = dft(x);
  const BispectrumMatrix b = bispectrum(y);
  const CMatrix cy = circulant(y.coeffs);
  for (std::size_t k1 = 0; k1 < 5; ++k1)
    for (std::size_t k2 = 0; k2 < 5; ++k2) {
      const cdouble matrix_form = y[k1] * std::conj(y[k2]) * cy(k1, k2);
      REQUIRE(std::abs(b.entries(k1, k2) - matrix_form) < 1e-12 * std::max(1.0, std::abs(matrix_form)));
    }
}

TEST_CASE("bispectrum is shift invariant", "[signal]") {
  for (std::size_t n : {5ul, 12ul, 41ul}) {
    const RealSignal x = random_signal(n, 1000 + n);
    const BispectrumMatrix b = bispectrum(dft(x));
    const double scale = frobenius_norm(b.entries);
    for (std::size_t s = 0; s < n; ++s) {
      const BispectrumMatrix bs = bispectrum(dft(cyclic_shift(x, static_cast<std::ptrdiff_t>(s))));
      REQUIRE(testutil::frob_diff(bs.entries, b.entries) / scale < 1e-9);
    }
  }
}

TEST_CASE("bispectrum is exactly Hermitian as constructed", "[signal]") {
  const BispectrumMatrix b = bispectrum(dft(random_signal(17, 3)));
  for (std::size_t r = 0; r < 17; ++r)
    for (std::size_t c = 0; c < 17; ++c) REQUIRE(b.entries(r, c) == std::conj(b.entries(c, r)));
}

TEST_CASE("bispectrum rejects non-symmetric coefficients", "[signal]") {
  FourierCoeffs y;
  y.coeffs = {cdouble(1, 0), cdouble(1, 1), cdouble(5, -3), cdouble(0, 2)};
  CHECK_THROWS_AS(bispectrum(y), std::invalid_argument);
}

TEST_CASE("normalized bispectrum of all-ones stays all ones", "[signal]") {
  BispectrumMatrix b{CMatrix(4, cdouble(1, 0))};
  const NormalizedBispectrum nb = normalize_bispectrum(b);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(nb.entries(r, c) == cdouble(1, 0));
}

TEST_CASE("normalized bispectrum matches the phase-factor form", "[signal]") {
  // B~ = y~ y~* o C(y~) for a clean zero-mean signal
  const RealSignal x = testutil::zero_mean(random_signal(5, 9));
  const NormalizedBispectrum nb = normalize_bispectrum(bispectrum(dft(x)));
  const PhaseVector yt = testutil::true_phases(x);
  const CMatrix cy = circulant(yt.phases);
  for (std::size_t k1 = 0; k1 < 5; ++k1)
    for (std::size_t k2 = 0; k2 < 5; ++k2) {
      const cdouble expected = yt[k1] * std::conj(yt[k2]) * cy(k1, k2);
      REQUIRE(std::abs(nb.entries(k1, k2) - expected) < 1e-12);
    }
}

TEST_CASE("normalized bispectrum maps zero entries to 1", "[signal]") {
  // constant signal: every entry but [0,0] is exactly zero
  const BispectrumMatrix b = bispectrum(dft(RealSignal{std::vector<double>(4, 2.0)}));
  const NormalizedBispectrum nb = normalize_bispectrum(b);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(nb.entries(r, c) == cdouble(1, 0));
}

TEST_CASE("normalized bispectrum entries are unit modulus and Hermitian", "[signal]") {
  const NormalizedBispectrum nb = normalize_bispectrum(bispectrum(dft(random_signal(9, 31))));
  for (std::size_t r = 0; r < 9; ++r) {
    REQUIRE(nb.entries(r, r).imag() == 0.0);
    for (std::size_t c = 0; c < 9; ++c) {
      REQUIRE(std::abs(std::abs(nb.entries(r, c)) - 1.0) < 1e-14);
      REQUIRE(nb.entries(r, c) == std::conj(nb.entries(c, r)));
    }
  }
}

TEST_CASE("normalize_bispectrum rejects a corrupted (non-Hermitian) estimate", "[signal]") {
  BispectrumMatrix b{CMatrix(3, cdouble(1, 0))};
  b.entries(0, 1) = cdouble(5, 5);  // breaks Hermitian structure badly
  CHECK_THROWS_AS(normalize_bispectrum(b), std::runtime_error);
}

TEST_CASE("relative error of a shifted copy is zero", "[signal]") {
  const RealSignal x = random_signal(11, 5);
  const AlignmentError e = relative_error(x, cyclic_shift(x, 3));
  CHECK(e.error < 1e-12);
  // R_s(R_3 x) = x needs s = N - 3
  CHECK(e.shift == 8);
}

TEST_CASE("relative error of the zero estimate is one", "[signal]") {
  const RealSignal x = random_signal(8, 6);
  const RealSignal zero{std::vector<double>(8, 0.0)};
  CHECK(relative_error(x, zero).error == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relative error of a negated zero-mean signal matches the exhaustive oracle",
          "[signal]") {
  const RealSignal x = testutil::zero_mean(random_signal(13, 8));
  RealSignal neg = x;
  for (double& v : neg.samples) v = -v;
  const AlignmentError fast = relative_error(x, neg);
  const auto oracle = exhaustive_relative_error(x, neg);
  CHECK(fast.shift == oracle.shift);
  CHECK(std::abs(fast.error - oracle.error) < 1e-12);
}

TEST_CASE("relative error fast path equals the exhaustive search for all N up to 64",
          "[signal]") {
  std::mt19937_64 gen(99);
  for (std::size_t n = 2; n <= 64; ++n) {
    const RealSignal t = random_signal(n, gen());
    const RealSignal e = random_signal(n, gen());
    const AlignmentError fast = relative_error(t, e);
    const auto oracle = exhaustive_relative_error(t, e);
    REQUIRE(fast.shift == oracle.shift);
    REQUIRE(std::abs(fast.error - oracle.error) < 1e-12);
  }
}

TEST_CASE("relative error rejects bad inputs", "[signal]") {
  const RealSignal x = random_signal(6, 1);
  CHECK_THROWS_AS(relative_error(x, random_signal(7, 2)), std::invalid_argument);
  CHECK_THROWS_AS(relative_error(RealSignal{std::vector<double>(6, 0.0)}, x),
                  std::invalid_argument);
}
