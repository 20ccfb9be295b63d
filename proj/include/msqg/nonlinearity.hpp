#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "msqg/coefficients.hpp"
#include "msqg/field.hpp"
#include "msqg/params.hpp"

namespace msqg {

/// Immutable sparse table of the quadratic map
///   out_k = sum_{h, k-h in input box} alpha_{k,h} in_h in_{k-h},   k in output box.
/// Each unordered pair {h, k-h} is stored once with weight 2 alpha_{k,h}.
/// Truncated nonlinearity B^N: out_extent = in_extent = N.
class InteractionTable {
 public:
  struct Entry {
    std::uint32_t h;    // slot of h in the input box
    std::uint32_t kmh;  // slot of k-h in the input box
    double weight;
  };

  InteractionTable(const ModelParams& params, int out_extent, int in_extent)
      : out_(out_extent), in_(in_extent) {
    params.validate();
    row_start_.reserve(out_.slots() + 1);
    row_start_.push_back(0);
    for (std::size_t slot = 0; slot < out_.slots(); ++slot) {
      const LatticeMode k = out_.mode(slot);
      if (!k.is_zero()) append_row(k, params);
      row_start_.push_back(static_cast<std::uint32_t>(entries_.size()));
    }
  }

  const Box& output_box() const { return out_; }
  const Box& input_box() const { return in_; }
  std::size_t size() const { return entries_.size(); }

  /// General complex input: every output mode computed independently.
  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    check_sizes(in, out);
    for (std::size_t slot = 0; slot < out_.slots(); ++slot) out[slot] = row(slot, in);
  }

  /// Hermitian input: representatives computed, conjugates mirrored, so the
  /// output is Hermitian to the last bit.
  void apply_hermitian(std::span<const Complex> in, std::span<Complex> out) const {
    check_sizes(in, out);
    const int e = out_.extent();
    out[out_.index({0, 0})] = {};
    for (int a = 0; a <= e; ++a)
      for (int b = (a == 0 ? 1 : -e); b <= e; ++b) {
        const LatticeMode k{a, b};
        const Complex v = row(out_.index(k), in);
        out[out_.index(k)] = v;
        out[out_.index(-k)] = std::conj(v);
      }
  }

  SpectralField apply(const SpectralField& psi) const {
    const SpectralField in = psi.extent() == in_.extent() ? psi : psi.with_extent(in_.extent());
    SpectralField out(out_.extent(), psi.hermitian());
    if (psi.hermitian())
      apply_hermitian(in.data(), out.data());
    else
      apply(in.data(), out.data());
    return out;
  }

 private:
  void append_row(LatticeMode k, const ModelParams& params) {
    const int e = in_.extent();
    for (int a = -e; a <= e; ++a)
      for (int b = -e; b <= e; ++b) {
        const LatticeMode h{a, b};
        const LatticeMode kh = k - h;
        if (h.is_zero() || kh.is_zero() || !in_.contains(kh)) continue;
        if (h > kh) continue;  // unordered pair, visited once
        const double w = alpha(k, h, params);
        if (w == 0.0) continue;
        entries_.push_back({static_cast<std::uint32_t>(in_.index(h)),
                            static_cast<std::uint32_t>(in_.index(kh)), 2.0 * w});
      }
  }

  Complex row(std::size_t slot, std::span<const Complex> in) const {
    double re = 0.0, im = 0.0;
    for (std::uint32_t i = row_start_[slot]; i < row_start_[slot + 1]; ++i) {
      const Entry& en = entries_[i];
      const Complex x = in[en.h], y = in[en.kmh];
      re += en.weight * (x.real() * y.real() - x.imag() * y.imag());
      im += en.weight * (x.real() * y.imag() + x.imag() * y.real());
    }
    return {re, im};
  }

  void check_sizes(std::span<const Complex> in, std::span<Complex> out) const {
    if (in.size() != in_.slots() || out.size() != out_.slots())
      throw std::invalid_argument("InteractionTable: buffer size mismatch");
  }

  Box out_;
  Box in_;
  std::vector<std::uint32_t> row_start_;
  std::vector<Entry> entries_;
};

/// Full quadratic nonlinearity B(psi); output extent is twice the input extent,
/// which contains the sum-set of the support.
inline SpectralField nonlinearity(const SpectralField& psi, const ModelParams& params) {
  params.validate_for_dynamics();
  return InteractionTable(params, 2 * psi.extent(), psi.extent()).apply(psi);
}

/// B^N(psi) = Pi_N B(Pi_N psi) with N = params.cutoff_N.
inline SpectralField truncated_nonlinearity(const SpectralField& psi, const ModelParams& params) {
  params.validate_for_dynamics();
  const int N = params.cutoff_N;
  return InteractionTable(params, N, N).apply(project(psi, N));
}

}  // namespace msqg
