#pragma once

#include <cmath>
#include <stdexcept>

#include "msqg/lattice.hpp"
#include "msqg/params.hpp"

namespace msqg {

/// Interaction coefficient alpha_{k,h} of B_k = sum_{h != 0,k} alpha_{k,h} psi_h psi_{k-h}.
///
/// Regularized:  -1/2 (h^perp . k/|k|) (|k-h|^{-d} |h| - |h|^{-d} |k-h|)
/// Streamline:   +1/2 |k|^{-(1+d)} (h^perp . k) (|k-h|^{1+d} - |h|^{1+d})
///               (|k|^{+(1+d)} when params.appendix_literal is set)
///
/// Swapping h and k-h negates both the cross product and the bracket exactly,
/// so alpha(k, h) == alpha(k, k-h) holds bit-for-bit.
inline double alpha(LatticeMode k, LatticeMode h, const ModelParams& params) {
  if (k.is_zero()) throw std::invalid_argument("alpha: k must be nonzero");
  const LatticeMode kh = k - h;
  if (h.is_zero() || kh.is_zero()) return 0.0;
  const std::int64_t cross = perp_dot(h, k);
  if (cross == 0) return 0.0;
  const std::int64_t p2 = h.norm_sq();
  const std::int64_t q2 = kh.norm_sq();
  if (p2 == q2) return 0.0;

  const double d = params.delta;
  const double p = std::sqrt(static_cast<double>(p2));
  const double q = std::sqrt(static_cast<double>(q2));
  const double knorm = k.norm();
  if (params.formulation == Formulation::Regularized) {
    const double bracket = std::pow(q, -d) * p - std::pow(p, -d) * q;
    return -0.5 * (static_cast<double>(cross) / knorm) * bracket;
  }
  const double bracket = std::pow(q, 1.0 + d) - std::pow(p, 1.0 + d);
  const double pref = std::pow(knorm, params.appendix_literal ? (1.0 + d) : -(1.0 + d));
  return 0.5 * pref * static_cast<double>(cross) * bracket;
}

/// alpha(k, h) that treats k = 0 as an inert mode (B_0 never evolves).
inline double alpha_or_zero(LatticeMode k, LatticeMode h, const ModelParams& params) {
  return k.is_zero() ? 0.0 : alpha(k, h, params);
}

}  // namespace msqg
