#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msqg {

/// Regularized: state is psi = |D|^delta phi, conserved quantity ||psi||_{H^1}.
/// Streamline:  state is phi itself, conserved quantity ||phi||_{H^{1+delta}}.
enum class Formulation { Regularized, Streamline };

inline std::string_view to_string(Formulation f) {
  return f == Formulation::Regularized ? "regularized" : "streamline";
}

inline Formulation parse_formulation(std::string_view s) {
  if (s == "regularized") return Formulation::Regularized;
  if (s == "streamline") return Formulation::Streamline;
  throw std::invalid_argument("unknown formulation '" + std::string(s) + "'");
}

struct ModelParams {
  double delta = 0.5;
  Formulation formulation = Formulation::Regularized;
  int cutoff_N = 4;
  /// Streamline only: prefactor |k|^{+(1+delta)} instead of |k|^{-(1+delta)}.
  /// Not conservative; diagnostics only, the flow rejects it.
  bool appendix_literal = false;

  /// Accepts delta in [0, 1]; delta = 0 is only meaningful for lattice-sum diagnostics.
  void validate() const {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
    if (cutoff_N < 1) throw std::invalid_argument("cutoff_N must be >= 1");
    if (appendix_literal && formulation != Formulation::Streamline)
      throw std::invalid_argument("appendix_literal requires the streamline formulation");
  }

  /// Dynamics need delta > 0 and a conservative coefficient set.
  void validate_for_dynamics() const {
    validate();
    if (delta <= 0.0)
      throw std::invalid_argument("delta = 0 is rejected for dynamics (nonlinearity not in L^2_rho)");
    if (appendix_literal)
      throw std::invalid_argument("appendix-literal coefficients are not conservative; diagnostics only");
  }

  /// Sobolev index of the conserved quadratic form.
  double conserved_index() const { return formulation == Formulation::Regularized ? 1.0 : 1.0 + delta; }
};

}  // namespace msqg
