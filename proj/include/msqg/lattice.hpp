#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace msqg {

/// Integer wavevector on the 2-torus dual lattice.
struct LatticeMode {
  int k1 = 0;
  int k2 = 0;

  constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }

  /// |k|^2 in exact integer arithmetic.
  constexpr std::int64_t norm_sq() const {
    return std::int64_t{k1} * k1 + std::int64_t{k2} * k2;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

  /// Box (max) norm, used only for the cutoff Pi_N.
  constexpr int box_norm() const {
    const int a = k1 < 0 ? -k1 : k1;
    const int b = k2 < 0 ? -k2 : k2;
    return a > b ? a : b;
  }

  /// Representative of the pair {k, -k}: k1 > 0, or k1 == 0 and k2 > 0.
  constexpr bool is_representative() const { return k1 > 0 || (k1 == 0 && k2 > 0); }

  constexpr LatticeMode operator-() const { return {-k1, -k2}; }
  constexpr LatticeMode operator+(LatticeMode o) const { return {k1 + o.k1, k2 + o.k2}; }
  constexpr LatticeMode operator-(LatticeMode o) const { return {k1 - o.k1, k2 - o.k2}; }
  constexpr auto operator<=>(const LatticeMode&) const = default;
};

/// h^perp . k with h^perp = (-h2, h1).
constexpr std::int64_t perp_dot(LatticeMode h, LatticeMode k) {
  return -std::int64_t{h.k2} * k.k1 + std::int64_t{h.k1} * k.k2;
}

/// Dense indexing of the square box {max(|k1|,|k2|) <= extent}, row-major with
/// k1 outer and k2 inner. The zero mode has a slot but never carries data.
class Box {
 public:
  explicit Box(int extent) : extent_(extent) {
    if (extent < 0) throw std::invalid_argument("Box: negative extent");
  }

  int extent() const { return extent_; }
  int side() const { return 2 * extent_ + 1; }
  std::size_t slots() const { return static_cast<std::size_t>(side()) * side(); }
  /// Number of nonzero modes, (2E+1)^2 - 1.
  std::size_t mode_count() const { return slots() - 1; }

  bool contains(LatticeMode k) const { return k.box_norm() <= extent_; }

  std::size_t index(LatticeMode k) const {
    return static_cast<std::size_t>(k.k1 + extent_) * side() + static_cast<std::size_t>(k.k2 + extent_);
  }
  LatticeMode mode(std::size_t idx) const {
    const int s = side();
    return {static_cast<int>(idx / s) - extent_, static_cast<int>(idx % s) - extent_};
  }

  /// All nonzero modes in row-major order.
  std::vector<LatticeMode> modes() const {
    std::vector<LatticeMode> out;
    out.reserve(mode_count());
    for (int a = -extent_; a <= extent_; ++a)
      for (int b = -extent_; b <= extent_; ++b)
        if (a != 0 || b != 0) out.push_back({a, b});
    return out;
  }

  /// One mode per pair {k, -k}.
  std::vector<LatticeMode> representatives() const {
    std::vector<LatticeMode> out;
    out.reserve(mode_count() / 2);
    for (auto k : modes())
      if (k.is_representative()) out.push_back(k);
    return out;
  }

 private:
  int extent_;
};

}  // namespace msqg
