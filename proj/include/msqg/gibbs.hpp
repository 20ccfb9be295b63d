#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "msqg/field.hpp"
#include "msqg/params.hpp"

namespace msqg {

/// Which covariance law to attach to a formulation.
///  Enstrophy:   E|psi_k|^2 = 2 |k|^{-2c}, c the conserved Sobolev index (invariant under the truncated flow).
///  MomentTable: E|psi_k|^2 = 2 |k|^{-4c}, the literal moment table.
enum class CovarianceLaw { Enstrophy, MomentTable };

inline std::string_view to_string(CovarianceLaw l) {
  return l == CovarianceLaw::Enstrophy ? "enstrophy" : "moment-table";
}

inline CovarianceLaw parse_covariance_law(std::string_view s) {
  if (s == "enstrophy") return CovarianceLaw::Enstrophy;
  if (s == "moment-table") return CovarianceLaw::MomentTable;
  throw std::invalid_argument("unknown covariance law '" + std::string(s) + "'");
}

/// Covariance law of the centered Gaussian measure: E|psi_k|^2 = scale |k|^{-2a}.
struct GibbsSpec {
  double exponent = 1.0;  // a
  double scale = 2.0;
  Formulation formulation = Formulation::Regularized;
  CovarianceLaw law = CovarianceLaw::Enstrophy;

  static GibbsSpec for_model(const ModelParams& params, CovarianceLaw law = CovarianceLaw::Enstrophy) {
    const double c = params.conserved_index();
    GibbsSpec s;
    s.exponent = law == CovarianceLaw::Enstrophy ? c : 2.0 * c;
    s.scale = 2.0;
    s.formulation = params.formulation;
    s.law = law;
    s.validate();
    return s;
  }

  /// The measure is supported in H^sigma for sigma < a - 1; a > 0 keeps that
  /// index above -1.
  void validate() const {
    if (!(exponent > 0.0)) throw std::invalid_argument("GibbsSpec: covariance exponent must be > 0");
    if (!(scale > 0.0)) throw std::invalid_argument("GibbsSpec: scale must be > 0");
  }

  double support_index() const { return exponent - 1.0; }
};

inline double covariance(LatticeMode k, const GibbsSpec& spec) {
  if (k.is_zero()) throw std::invalid_argument("covariance: k must be nonzero");
  return spec.scale * std::pow(static_cast<double>(k.norm_sq()), -spec.exponent);
}

/// Reproducible random stream keyed by (master seed, stream id).
struct SeededStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  std::mt19937_64 engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                      0x6d736767u};
    return std::mt19937_64(seq);
  }

  SeededStream child(std::uint64_t id) const {
    return {master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)), id};
  }
};

enum class SamplingMode {
  Hermitian,           // real physical field: one complex Gaussian per pair {k,-k}
  IndependentComplex,  // every mode independent; static moment checks only
};

namespace detail {

/// Draws box modes with lo < max(|k1|,|k2|) <= hi.
template <class Rng>
void fill_shell(SpectralField& f, int lo, int hi, const GibbsSpec& spec, SamplingMode mode, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int a = -hi; a <= hi; ++a)
    for (int b = -hi; b <= hi; ++b) {
      const LatticeMode k{a, b};
      if (k.is_zero() || k.box_norm() <= lo) continue;
      if (mode == SamplingMode::Hermitian && !k.is_representative()) continue;
      const double sd = std::sqrt(0.5 * covariance(k, spec));
      const double re = sd * normal(rng);
      const double im = sd * normal(rng);
      f.set(k, {re, im});
      if (mode == SamplingMode::Hermitian) f.set(-k, {re, -im});
    }
}

}  // namespace detail

/// Sample of rho_N: Hermitian field on box N with independent complex Gaussian
/// coefficients, E psi_k = 0, E psi_k^2 = 0, E|psi_k|^2 = covariance(k).
inline SpectralField sample_field(const GibbsSpec& spec, int N, const SeededStream& stream,
                                  SamplingMode mode = SamplingMode::Hermitian) {
  if (N < 1) throw std::invalid_argument("sample_field: N must be >= 1");
  spec.validate();
  SpectralField f(N, mode == SamplingMode::Hermitian);
  auto rng = stream.engine();
  detail::fill_shell(f, 0, N, spec, mode, rng);
  return f;
}

/// Sample of rho_N^perp restricted to N < max(|k1|,|k2|) <= outer. Result has extent `outer`.
inline SpectralField sample_complement(const GibbsSpec& spec, int N, int outer, const SeededStream& stream) {
  if (outer < N) throw std::invalid_argument("sample_complement: outer extent below N");
  SpectralField f(outer, true);
  auto rng = stream.engine();
  detail::fill_shell(f, N, outer, spec, SamplingMode::Hermitian, rng);
  return f;
}

/// -sum |psi_k|^2 / covariance(k) over one representative per pair {k,-k} in box N
/// (the log-density of rho_N up to its normalization constant).
inline double log_density_truncated(const SpectralField& psi_N, const GibbsSpec& spec, int N) {
  const int e = psi_N.extent();
  for (int a = -e; a <= e; ++a)
    for (int b = -e; b <= e; ++b) {
      const LatticeMode k{a, b};
      if (k.box_norm() > N && psi_N[k] != Complex{})
        throw std::invalid_argument("log_density_truncated: field has support outside box N");
    }
  double acc = 0.0;
  const int lim = std::min(N, e);
  for (int a = 0; a <= lim; ++a)
    for (int b = (a == 0 ? 1 : -lim); b <= lim; ++b) {
      const LatticeMode k{a, b};
      acc -= std::norm(psi_N[k]) / covariance(k, spec);
    }
  return acc;
}

/// log of the normalization prefactor prod_{reps} 1/(pi C_k) of the complex
/// Gaussian density over box N.
inline double log_normalization(const GibbsSpec& spec, int N) {
  double acc = 0.0;
  for (int a = 0; a <= N; ++a)
    for (int b = (a == 0 ? 1 : -N); b <= N; ++b) acc -= std::log(std::numbers::pi * covariance({a, b}, spec));
  return acc;
}

/// E||psi||^2_{H^sigma} restricted to box `extent`: sum covariance(k) |k|^{2 sigma}.
inline double expected_sobolev_norm_sq(const GibbsSpec& spec, int extent, double sigma) {
  double acc = 0.0;
  for (int a = -extent; a <= extent; ++a)
    for (int b = -extent; b <= extent; ++b) {
      const LatticeMode k{a, b};
      if (k.is_zero()) continue;
      acc += covariance(k, spec) * std::pow(static_cast<double>(k.norm_sq()), sigma);
    }
  return acc;
}

}  // namespace msqg
