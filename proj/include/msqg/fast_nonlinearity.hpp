#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "msqg/field.hpp"
#include "msqg/params.hpp"

namespace msqg {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline FftwBuffer fftw_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

}  // namespace detail

/// Smallest grid per axis for which the projected quadratic product is exact:
/// products of box-N factors reach |k| <= 2N, and aliases land back in box N
/// unless M > 3N.
inline int min_exact_grid(int N) { return 3 * N + 1; }
inline int default_grid(int N) { return 2 * (2 * N + 1); }

/// Pseudo-spectral evaluation of B^N with zero-padded transforms.
///
/// Both formulations share the structure
///   alpha_{k,h} = c |k|^p (h^perp . (k-h)) (f(|k-h|) g(|h|) - f(|h|) g(|k-h|)),
/// so B_k = c |k|^p [ (h^perp g psi) * ((k-h) f psi) - (h^perp f psi) * ((k-h) g psi) ]_k,
/// a sum of four products of transformed factors, evaluated pointwise on the grid.
class FastNonlinearity {
 public:
  FastNonlinearity(const ModelParams& params, int grid = 0)
      : params_(params), N_(params.cutoff_N), M_(grid == 0 ? default_grid(params.cutoff_N) : grid) {
    params_.validate_for_dynamics();
    if (M_ < min_exact_grid(N_))
      throw std::invalid_argument("FastNonlinearity: grid " + std::to_string(M_) +
                                  " too small for exact products at N=" + std::to_string(N_) +
                                  " (need >= " + std::to_string(min_exact_grid(N_)) + ")");
    const std::size_t n = static_cast<std::size_t>(M_) * M_;
    for (auto& b : factor_) b = detail::fftw_buffer(n);
    product_ = detail::fftw_buffer(n);
    std::lock_guard lock(detail::fftw_planner_mutex());
    for (std::size_t i = 0; i < factor_.size(); ++i)
      backward_[i] = fftw_plan_dft_2d(M_, M_, factor_[i].get(), factor_[i].get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    forward_ = fftw_plan_dft_2d(M_, M_, product_.get(), product_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }

  ~FastNonlinearity() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    for (auto p : backward_) fftw_destroy_plan(p);
    fftw_destroy_plan(forward_);
  }

  FastNonlinearity(const FastNonlinearity&) = delete;
  FastNonlinearity& operator=(const FastNonlinearity&) = delete;

  int grid() const { return M_; }

  /// Not thread-safe (owns scratch buffers); use one instance per thread.
  SpectralField operator()(const SpectralField& psi) {
    const bool reg = params_.formulation == Formulation::Regularized;
    const double d = params_.delta;
    // f, g radial symbols
    auto f = [&](double r) { return reg ? std::pow(r, -d) : std::pow(r, 1.0 + d); };
    auto g = [&](double r) { return reg ? r : 1.0; };

    const std::size_t n = static_cast<std::size_t>(M_) * M_;
    for (auto& b : factor_)
      for (std::size_t i = 0; i < n; ++i) b[i][0] = b[i][1] = 0.0;

    // factors: 0,1 = h^perp g psi; 2,3 = h f psi; 4,5 = h^perp f psi; 6,7 = h g psi
    for (int a = -N_; a <= N_; ++a)
      for (int b = -N_; b <= N_; ++b) {
        if (a == 0 && b == 0) continue;
        const Complex v = psi[{a, b}];
        if (v == Complex{}) continue;
        const double r = std::sqrt(static_cast<double>(a) * a + static_cast<double>(b) * b);
        const double fr = f(r), gr = g(r);
        const std::array<double, 8> mult{-b * gr, a * gr, a * fr, b * fr, -b * fr, a * fr, a * gr, b * gr};
        const std::size_t idx = slot(a, b);
        for (std::size_t j = 0; j < 8; ++j) {
          factor_[j][idx][0] = mult[j] * v.real();
          factor_[j][idx][1] = mult[j] * v.imag();
        }
      }
    for (auto p : backward_) fftw_execute(p);

    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = cmul(0, 2, i) + cmul(1, 3, i) - cmul(4, 6, i) - cmul(5, 7, i);
      product_[i][0] = acc.real();
      product_[i][1] = acc.imag();
    }
    fftw_execute(forward_);

    const double c = reg ? -0.5 : 0.5;
    const double p = reg ? -1.0 : -(1.0 + d);
    const double scale = 1.0 / static_cast<double>(n);
    SpectralField out(N_, psi.hermitian());
    for (int a = -N_; a <= N_; ++a)
      for (int b = -N_; b <= N_; ++b) {
        if (a == 0 && b == 0) continue;
        const double k = std::sqrt(static_cast<double>(a) * a + static_cast<double>(b) * b);
        const std::size_t idx = slot(a, b);
        const double pref = c * std::pow(k, p) * scale;
        out.set({a, b}, pref * Complex{product_[idx][0], product_[idx][1]});
      }
    if (psi.hermitian()) symmetrize(out);
    return out;
  }

 private:
  std::size_t slot(int a, int b) const {
    const int i = ((a % M_) + M_) % M_;
    const int j = ((b % M_) + M_) % M_;
    return static_cast<std::size_t>(i) * M_ + static_cast<std::size_t>(j);
  }

  Complex cmul(std::size_t x, std::size_t y, std::size_t i) const {
    return Complex{factor_[x][i][0], factor_[x][i][1]} * Complex{factor_[y][i][0], factor_[y][i][1]};
  }

  static void symmetrize(SpectralField& out) {
    const int e = out.extent();
    for (int a = 0; a <= e; ++a)
      for (int b = (a == 0 ? 1 : -e); b <= e; ++b) {
        const Complex v = 0.5 * (out[{a, b}] + std::conj(out[{-a, -b}]));
        out.set({a, b}, v);
        out.set({-a, -b}, std::conj(v));
      }
  }

  ModelParams params_;
  int N_;
  int M_;
  std::array<detail::FftwBuffer, 8> factor_;
  detail::FftwBuffer product_;
  std::array<fftw_plan, 8> backward_{};
  fftw_plan forward_{};
};

/// One-shot convenience wrapper; the input is projected onto box N first.
inline SpectralField fast_nonlinearity(const SpectralField& psi, const ModelParams& params, int grid = 0) {
  FastNonlinearity op(params, grid);
  return op(project(psi, params.cutoff_N));
}

}  // namespace msqg
