#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msqg/lattice.hpp"

namespace msqg {

using Complex = std::complex<double>;

/// Finitely supported field on the nonzero lattice, stored densely over the box
/// of half-width extent(). The zero mode is never populated.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int extent, bool hermitian = true)
      : box_(extent), coeffs_(box_.slots(), Complex{}), hermitian_(hermitian) {}

  /// Builds a field from explicit (mode, value) entries; the extent is the
  /// smallest box containing them. With hermitian = true the conjugate entry at
  /// -k is filled in.
  static SpectralField from_modes(std::initializer_list<std::pair<LatticeMode, Complex>> entries,
                                  bool hermitian = true) {
    int extent = 0;
    for (const auto& [k, v] : entries) extent = std::max(extent, k.box_norm());
    SpectralField f(extent, hermitian);
    for (const auto& [k, v] : entries) {
      f.set(k, v);
      if (hermitian) f.set(-k, std::conj(v));
    }
    return f;
  }

  const Box& box() const { return box_; }
  int extent() const { return box_.extent(); }
  bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  Complex operator[](LatticeMode k) const {
    if (k.is_zero() || !box_.contains(k)) return {};
    return coeffs_[box_.index(k)];
  }

  void set(LatticeMode k, Complex v) {
    if (k.is_zero()) throw std::invalid_argument("SpectralField: the zero mode carries no coefficient");
    if (!box_.contains(k)) throw std::out_of_range("SpectralField: mode outside storage box");
    coeffs_[box_.index(k)] = v;
  }

  std::span<const Complex> data() const { return coeffs_; }
  std::span<Complex> data() { return coeffs_; }

  /// Same values re-stored on a box of a different extent (truncating if smaller).
  SpectralField with_extent(int extent) const {
    SpectralField out(extent, hermitian_);
    const int e = std::min(extent, this->extent());
    for (int a = -e; a <= e; ++a)
      for (int b = -e; b <= e; ++b)
        if (a != 0 || b != 0) out.coeffs_[out.box_.index({a, b})] = coeffs_[box_.index({a, b})];
    return out;
  }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) { return c == Complex{}; });
  }

  /// Largest |psi_{-k} - conj(psi_k)| over stored modes.
  double hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const LatticeMode k = box_.mode(i);
      if (k.is_zero()) continue;
      worst = std::max(worst, std::abs(coeffs_[box_.index(-k)] - std::conj(coeffs_[i])));
    }
    return worst;
  }

  SpectralField& operator+=(const SpectralField& o) { return axpy(1.0, o); }
  SpectralField& operator-=(const SpectralField& o) { return axpy(-1.0, o); }
  SpectralField& operator*=(double c) {
    for (auto& v : coeffs_) v *= c;
    return *this;
  }

  /// this += c * o, growing the storage box if o is wider.
  SpectralField& axpy(double c, const SpectralField& o) {
    if (o.extent() > extent()) *this = with_extent(o.extent());
    hermitian_ = hermitian_ && o.hermitian_;
    const int e = o.extent();
    for (int a = -e; a <= e; ++a)
      for (int b = -e; b <= e; ++b) coeffs_[box_.index({a, b})] += c * o.coeffs_[o.box_.index({a, b})];
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double c, SpectralField a) { return a *= c; }

 private:
  Box box_;
  std::vector<Complex> coeffs_;
  bool hermitian_;
};

/// Pi_N: keeps modes with max(|k1|,|k2|) <= N. Result has extent N.
inline SpectralField project(const SpectralField& psi, int N) {
  if (N < 0) throw std::invalid_argument("project: N must be >= 0");
  return psi.with_extent(N);
}

/// (I - Pi_N): keeps modes outside the box. Result keeps psi's extent.
inline SpectralField project_complement(const SpectralField& psi, int N) {
  SpectralField out = psi;
  const int e = std::min(N, psi.extent());
  auto d = out.data();
  for (int a = -e; a <= e; ++a)
    for (int b = -e; b <= e; ++b) d[out.box().index({a, b})] = {};
  return out;
}

/// sum_k |k|^{2s} |psi_k|^2 over stored modes (Euclidean |k|).
inline double sobolev_norm_sq(const SpectralField& psi, double s) {
  double acc = 0.0;
  const auto d = psi.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == Complex{}) continue;
    const auto k2 = static_cast<double>(psi.box().mode(i).norm_sq());
    acc += std::pow(k2, s) * std::norm(d[i]);
  }
  return acc;
}

/// max_k |a_k - b_k| over the union of both supports.
inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  const int e = std::max(a.extent(), b.extent());
  double worst = 0.0;
  for (int x = -e; x <= e; ++x)
    for (int y = -e; y <= e; ++y) {
      if (x == 0 && y == 0) continue;
      worst = std::max(worst, std::abs(a[{x, y}] - b[{x, y}]));
    }
  return worst;
}

inline double max_abs(const SpectralField& a) {
  double worst = 0.0;
  for (auto v : a.data()) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace msqg
