// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "mra/invariants.hpp"
#include "mra/signal.hpp"
#include "mra/simulate.hpp"

namespace mra {

namespace detail {

// little-endian scalar encoding, independent of host byte order

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bits |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw std::runtime_error(context + ": bad numeric token '" + token + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& token, const std::string& context) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw std::runtime_error(context + ": bad integer token '" + token + "'");
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Observation sets: binary, little-endian.
//   magic "MRA1" | u16 version=1 | u32 N | u64 M | f64 sigma | u8 flags
//   | M*N f64 samples row-major | (flags bit 0) M u32 shifts
// ---------------------------------------------------------------------------

inline void write_observations(std::ostream& out, const ObservationSet& obs) {
  if (obs.data.size() != obs.m * obs.n)
    throw std::invalid_argument("write_observations: inconsistent dimensions");
  if (obs.has_shifts() && obs.true_shifts.size() != obs.m)
    throw std::invalid_argument("write_observations: shift count mismatch");
  std::string buf;
  buf.reserve(19 + obs.data.size() * 8 + obs.true_shifts.size() * 4);
  buf.append("MRA1");
  detail::put_le<std::uint16_t>(buf, 1);
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(obs.n));
  detail::put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(obs.m));
  detail::put_le<double>(buf, obs.sigma);
  detail::put_le<std::uint8_t>(buf, obs.has_shifts() ? 1 : 0);
  for (double v : obs.data) detail::put_le<double>(buf, v);
  for (std::uint32_t s : obs.true_shifts) detail::put_le<std::uint32_t>(buf, s);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_observations: stream write failed");
}

inline void write_observations(const std::string& path, const ObservationSet& obs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_observations: cannot open '" + path + "'");
  write_observations(f, obs);
}

inline ObservationSet read_observations(std::istream& in) {
  auto read_exact = [&](char* dst, std::size_t len, const char* what) {
    in.read(dst, static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in.gcount()) != len)
      throw std::runtime_error(std::string("read_observations: truncated file (") + what + ")");
  };
  // 4 magic + 2 version + 4 N + 8 M + 8 sigma + 1 flags
  char header[27];
  read_exact(header, sizeof(header), "header");
  if (std::memcmp(header, "MRA1", 4) != 0)
    throw std::runtime_error("read_observations: bad magic bytes");
  const auto version = detail::get_le<std::uint16_t>(header + 4);
  if (version != 1)
    throw std::runtime_error("read_observations: unsupported version " + std::to_string(version));
  ObservationSet obs;
  obs.n = detail::get_le<std::uint32_t>(header + 6);
  obs.m = detail::get_le<std::uint64_t>(header + 10);
  obs.sigma = detail::get_le<double>(header + 18);
  const auto flags = static_cast<std::uint8_t>(header[26]);
  if (obs.n < 2 || obs.m < 1)
    throw std::runtime_error("read_observations: invalid dimensions");
  if (flags > 1) throw std::runtime_error("read_observations: unknown flags");

  obs.data.resize(obs.m * obs.n);
  std::vector<char> raw(obs.data.size() * 8);
  read_exact(raw.data(), raw.size(), "samples");
  for (std::size_t i = 0; i < obs.data.size(); ++i)
    obs.data[i] = detail::get_le<double>(raw.data() + i * 8);
  if (flags & 1) {
    obs.true_shifts.resize(obs.m);
    std::vector<char> sraw(obs.m * 4);
    read_exact(sraw.data(), sraw.size(), "shifts");
    for (std::size_t j = 0; j < obs.m; ++j) {
      obs.true_shifts[j] = detail::get_le<std::uint32_t>(sraw.data() + j * 4);
      if (obs.true_shifts[j] >= obs.n)
        throw std::runtime_error("read_observations: shift out of range");
    }
  }
  return obs;
}

inline ObservationSet read_observations(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_observations: cannot open '" + path + "'");
  return read_observations(f);
}

// ---------------------------------------------------------------------------
// Invariant estimates: line-oriented text, exact round-trip doubles.
//   mra-invariants 1
//   n <N> / m <M> / sigma <v> / mean <v>
//   power <N values>
//   bispectrum            (N lines of 2N values, re im interleaved)
// ---------------------------------------------------------------------------

/// The estimated invariants of one observation set, as persisted between the
/// estimation and inversion stages.
struct InvariantEstimates {
  std::size_t n = 0;
  std::uint64_t m = 0;
  double sigma = 0.0;
  double mean = 0.0;
  PowerSpectrum power;
  BispectrumMatrix bispectrum;
};

inline void write_invariants(std::ostream& out, const InvariantEstimates& inv) {
  if (inv.power.size() != inv.n || inv.bispectrum.dim() != inv.n)
    throw std::invalid_argument("write_invariants: inconsistent dimensions");
  out << "mra-invariants 1\n";
  out << "n " << inv.n << "\n";
  out << "m " << inv.m << "\n";
  out << "sigma " << detail::format_double(inv.sigma) << "\n";
  out << "mean " << detail::format_double(inv.mean) << "\n";
  out << "power";
  for (double v : inv.power.values) out << ' ' << detail::format_double(v);
  out << "\nbispectrum\n";
  for (std::size_t r = 0; r < inv.n; ++r) {
    for (std::size_t c = 0; c < inv.n; ++c) {
      const cdouble z = inv.bispectrum.entries(r, c);
      out << (c ? " " : "") << detail::format_double(z.real()) << ' '
          << detail::format_double(z.imag());
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_invariants: stream write failed");
}

inline void write_invariants(const std::string& path, const InvariantEstimates& inv) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_invariants: cannot open '" + path + "'");
  write_invariants(f, inv);
}

inline InvariantEstimates read_invariants(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw std::runtime_error(std::string("read_invariants: missing ") + what);
    return line;
  };
  if (next_line("header") != "mra-invariants 1")
    throw std::runtime_error("read_invariants: bad header line");

  InvariantEstimates inv;
  auto read_kv = [&](const char* key) {
    next_line(key);
    std::istringstream ss(line);
    std::string k, v;
    if (!(ss >> k >> v) || k != key)
      throw std::runtime_error(std::string("read_invariants: expected '") + key + "' line");
    return v;
  };
  inv.n = static_cast<std::size_t>(detail::parse_u64(read_kv("n"), "read_invariants n"));
  inv.m = detail::parse_u64(read_kv("m"), "read_invariants m");
  inv.sigma = detail::parse_double(read_kv("sigma"), "read_invariants sigma");
  inv.mean = detail::parse_double(read_kv("mean"), "read_invariants mean");
  if (inv.n < 2) throw std::runtime_error("read_invariants: n must be at least 2");

  {
    next_line("power");
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "power") throw std::runtime_error("read_invariants: expected 'power' line");
    inv.power.values.resize(inv.n);
    std::string tok;
    for (std::size_t k = 0; k < inv.n; ++k) {
      if (!(ss >> tok)) throw std::runtime_error("read_invariants: power line too short");
      inv.power.values[k] = detail::parse_double(tok, "read_invariants power");
    }
  }
  if (next_line("bispectrum") != "bispectrum")
    throw std::runtime_error("read_invariants: expected 'bispectrum' line");
  inv.bispectrum.entries = CMatrix(inv.n);
  for (std::size_t r = 0; r < inv.n; ++r) {
    next_line("bispectrum row");
    std::istringstream ss(line);
    std::string re, im;
    for (std::size_t c = 0; c < inv.n; ++c) {
      if (!(ss >> re >> im))
        throw std::runtime_error("read_invariants: bispectrum row " + std::to_string(r) +
                                 " too short");
      inv.bispectrum.entries(r, c) = cdouble(detail::parse_double(re, "read_invariants bispectrum"),
                                             detail::parse_double(im, "read_invariants bispectrum"));
    }
  }
  return inv;
}

inline InvariantEstimates read_invariants(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_invariants: cannot open '" + path + "'");
  return read_invariants(f);
}

// ---------------------------------------------------------------------------
// Signals: plain text, one sample per line.
// ---------------------------------------------------------------------------

inline void write_signal_text(std::ostream& out, const RealSignal& x) {
  for (double v : x.samples) out << detail::format_double(v) << '\n';
  if (!out) throw std::runtime_error("write_signal_text: stream write failed");
}

inline void write_signal_text(const std::string& path, const RealSignal& x) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_signal_text: cannot open '" + path + "'");
  write_signal_text(f, x);
}

inline RealSignal read_signal_text(std::istream& in) {
  std::vector<double> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    samples.push_back(detail::parse_double(line, "read_signal_text line " + std::to_string(lineno)));
  }
  if (samples.size() < 2)
    throw std::runtime_error("read_signal_text: fewer than 2 samples");
  return RealSignal{std::move(samples)};
}

inline RealSignal read_signal_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_signal_text: cannot open '" + path + "'");
  return read_signal_text(f);
}

}  // namespace mra
