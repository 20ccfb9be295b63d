#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "msqg/field.hpp"
#include "msqg/params.hpp"

namespace msqg {

// Binary field snapshot, little-endian:
//   "MSQG" | version u32 | N u32 | delta f64 | formulation u8 | hermitian u8 |
//   (re f64, im f64) for every nonzero box mode, k1 outer / k2 inner, -N..N.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  int N = 0;
  double delta = 0.0;
  Formulation formulation = Formulation::Regularized;
  SpectralField field;
};

namespace detail {

template <class T>
void write_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T read_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

/// Writes the box-N part of `field` (modes outside the box are not stored).
inline void write_snapshot(std::ostream& os, const SpectralField& field, int N, const ModelParams& params) {
  if (N < 0) throw std::invalid_argument("write_snapshot: negative N");
  os.write("MSQG", 4);
  detail::write_le<std::uint32_t>(os, kSnapshotVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(N));
  detail::write_le<double>(os, params.delta);
  detail::write_le<std::uint8_t>(os, params.formulation == Formulation::Regularized ? 0 : 1);
  detail::write_le<std::uint8_t>(os, field.hermitian() ? 1 : 0);
  for (int a = -N; a <= N; ++a)
    for (int b = -N; b <= N; ++b) {
      if (a == 0 && b == 0) continue;
      const Complex v = field[{a, b}];
      detail::write_le<double>(os, v.real());
      detail::write_le<double>(os, v.imag());
    }
  if (!os) throw std::runtime_error("write_snapshot: stream error");
}

inline Snapshot read_snapshot(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MSQG", 4) != 0) throw std::runtime_error("snapshot: bad magic");
  const auto version = detail::read_le<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
  Snapshot s;
  s.N = static_cast<int>(detail::read_le<std::uint32_t>(is));
  s.delta = detail::read_le<double>(is);
  const auto form = detail::read_le<std::uint8_t>(is);
  if (form > 1) throw std::runtime_error("snapshot: bad formulation byte");
  s.formulation = form == 0 ? Formulation::Regularized : Formulation::Streamline;
  const bool herm = detail::read_le<std::uint8_t>(is) != 0;
  s.field = SpectralField(s.N, herm);
  for (int a = -s.N; a <= s.N; ++a)
    for (int b = -s.N; b <= s.N; ++b) {
      if (a == 0 && b == 0) continue;
      const double re = detail::read_le<double>(is);
      const double im = detail::read_le<double>(is);
      s.field.set({a, b}, {re, im});
    }
  return s;
}

inline void save_snapshot(const std::string& path, const SpectralField& field, int N, const ModelParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_snapshot(os, field, N, params);
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace msqg
