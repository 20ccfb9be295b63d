#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msqg/field.hpp"
#include "msqg/gibbs.hpp"
#include "msqg/nonlinearity.hpp"
#include "msqg/params.hpp"

namespace msqg {

enum class Method { ImplicitMidpoint, RK4 };

inline std::string_view to_string(Method m) { return m == Method::ImplicitMidpoint ? "implicit-midpoint" : "rk4"; }

inline Method parse_method(std::string_view s) {
  if (s == "implicit-midpoint" || s == "midpoint") return Method::ImplicitMidpoint;
  if (s == "rk4") return Method::RK4;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

struct IntegratorConfig {
  Method method = Method::ImplicitMidpoint;
  double dt = 0.01;
  double fixed_point_tol = 1e-13;
  int max_fixed_point_iters = 100;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
    if (!(fixed_point_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: fixed_point_tol must be > 0");
    if (max_fixed_point_iters < 1) throw std::invalid_argument("IntegratorConfig: max_fixed_point_iters must be >= 1");
  }
};

/// The implicit-midpoint fixed point did not contract; a smaller dt usually helps.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(int iterations, double residual)
      : std::runtime_error("implicit midpoint fixed point did not converge after " + std::to_string(iterations) +
                           " iterations (residual " + std::to_string(residual) + "); try a smaller dt"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Which vector field drives the box part.
enum class FlowVariant {
  Truncated,            // B^N = Pi_N B(Pi_N psi)
  SkipInnerProjection,  // Pi_N B(psi): the frozen complement leaks in (negative control)
};

/// Integrator for d/dt Psi = B^N(Psi). Only the box-N part moves; everything
/// outside the box is carried along unchanged.
class GalerkinFlow {
 public:
  GalerkinFlow(const ModelParams& params, const IntegratorConfig& config,
               FlowVariant variant = FlowVariant::Truncated, int complement_extent = 0)
      : params_(checked(params)),
        config_(checked(config)),
        variant_(variant),
        in_extent_(variant == FlowVariant::Truncated ? params.cutoff_N
                                                     : std::max(complement_extent, params.cutoff_N)),
        table_(params, params.cutoff_N, in_extent_),
        box_(params.cutoff_N) {}

  const ModelParams& params() const { return params_; }
  const IntegratorConfig& config() const { return config_; }
  FlowVariant variant() const { return variant_; }
  int N() const { return params_.cutoff_N; }

  /// One step of size config().dt.
  SpectralField step(const SpectralField& state) const { return advance_by(state, config_.dt); }

  /// One step of signed size h (negative h integrates backward in time).
  SpectralField advance_by(const SpectralField& state, double h) const {
    require_hermitian(state);
    Work w = make_work(state);
    step_box(w, h);
    return w.assemble(state);
  }

  /// Integrates over a signed duration with steps of at most config().dt,
  /// the last one shortened.
  SpectralField advance(const SpectralField& state, double duration) const {
    require_hermitian(state);
    Work w = make_work(state);
    for (double h : step_sizes(duration)) step_box(w, h);
    return w.assemble(state);
  }

  /// B^N evaluated on the box part of `state` (extent N).
  SpectralField vector_field(const SpectralField& state) const {
    Work w = make_work(state);
    SpectralField out(N(), true);
    rhs(w, w.y, out.data());
    return out;
  }

  std::vector<double> step_sizes(double duration) const {
    std::vector<double> hs;
    const double span = std::abs(duration);
    if (span == 0.0) return hs;
    const double sign = duration < 0 ? -1.0 : 1.0;
    const auto n = static_cast<std::size_t>(std::ceil(span / config_.dt - 1e-9));
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = std::min(config_.dt, span - t);
      hs.push_back(sign * h);
      t += h;
    }
    return hs;
  }

  /// Dense box-N working state plus the frozen input embedding used by the
  /// negative-control variant.
  struct Work {
    std::vector<Complex> y;         // box N slots
    std::vector<Complex> embed;     // input-box slots (variant only)
    const Box* box;
    const Box* in_box;

    SpectralField assemble(const SpectralField& state) const {
      SpectralField out = state.extent() >= box->extent() ? state : state.with_extent(box->extent());
      const int n = box->extent();
      for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b)
          if (a != 0 || b != 0) out.set({a, b}, y[box->index({a, b})]);
      out.set_hermitian(true);
      return out;
    }
  };

  Work make_work(const SpectralField& state) const {
    Work w{std::vector<Complex>(box_.slots()), {}, &box_, &table_.input_box()};
    const int n = N();
    for (int a = -n; a <= n; ++a)
      for (int b = -n; b <= n; ++b)
        if (a != 0 || b != 0) w.y[box_.index({a, b})] = state[{a, b}];
    if (variant_ == FlowVariant::SkipInnerProjection) {
      const Box& in = table_.input_box();
      w.embed.assign(in.slots(), Complex{});
      const int e = in.extent();
      for (int a = -e; a <= e; ++a)
        for (int b = -e; b <= e; ++b)
          if (LatticeMode k{a, b}; !k.is_zero() && k.box_norm() > n) w.embed[in.index(k)] = state[k];
    }
    return w;
  }

  /// out = vector field at box state y.
  void rhs(Work& w, std::span<const Complex> y, std::span<Complex> out) const {
    if (variant_ == FlowVariant::Truncated) {
      table_.apply_hermitian(y, out);
      return;
    }
    const int n = N();
    const Box& in = table_.input_box();
    for (int a = -n; a <= n; ++a)
      for (int b = -n; b <= n; ++b) w.embed[in.index({a, b})] = y[box_.index({a, b})];
    table_.apply_hermitian(w.embed, out);
  }

  /// Returns the number of fixed-point iterations used (0 for RK4).
  int step_box(Work& w, double h) const {
    if (config_.method == Method::RK4) {
      rk4(w, h);
      return 0;
    }
    return midpoint(w, h);
  }

 private:
  static const ModelParams& checked(const ModelParams& p) {
    p.validate_for_dynamics();
    return p;
  }
  static const IntegratorConfig& checked(const IntegratorConfig& c) {
    c.validate();
    return c;
  }

  static void require_hermitian(const SpectralField& state) {
    if (!state.hermitian() || state.hermitian_defect() > 1e-14 * (1.0 + max_abs(state)))
      throw std::invalid_argument("GalerkinFlow: state must be Hermitian (real physical field)");
  }

  int midpoint(Work& w, double h) const {
    const std::size_t n = w.y.size();
    std::vector<Complex> y0 = w.y, mid(n), f(n), next(n);
    rhs(w, y0, f);
    for (std::size_t i = 0; i < n; ++i) next[i] = y0[i] + h * f[i];
    double scale = 1.0;
    for (auto v : y0) scale = std::max(scale, std::abs(v));
    double diff = 0.0;
    for (int it = 1; it <= config_.max_fixed_point_iters; ++it) {
      for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (y0[i] + next[i]);
      rhs(w, mid, f);
      diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Complex g = y0[i] + h * f[i];
        diff = std::max(diff, std::abs(g - next[i]));
        next[i] = g;
      }
      if (!std::isfinite(diff)) break;
      if (diff <= config_.fixed_point_tol * scale) {
        w.y = std::move(next);
        return it;
      }
    }
    throw NonConvergence(config_.max_fixed_point_iters, diff);
  }

  void rk4(Work& w, double h) const {
    const std::size_t n = w.y.size();
    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const auto& y = w.y;
    rhs(w, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(w, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(w, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(w, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) w.y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  ModelParams params_;
  IntegratorConfig config_;
  FlowVariant variant_;
  int in_extent_;
  InteractionTable table_;
  Box box_;
};

/// Conserved quadratic form of the formulation: ||Pi_N psi||^2_{H^c}.
inline double conserved_quantity(const SpectralField& state, const ModelParams& params) {
  return sobolev_norm_sq(project(state, params.cutoff_N), params.conserved_index());
}

struct DriftReport {
  double initial = 0.0;        // conserved quantity at t = 0
  double final = 0.0;
  double max_relative = 0.0;   // max_t |Q(t) - Q(0)| / Q(0)
  double log_density_max_relative = 0.0;
  double complement_max_change = 0.0;  // must be exactly 0
  double hermitian_max_defect = 0.0;   // must be exactly 0
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  ModelParams params;
  IntegratorConfig config;
  std::optional<GibbsSpec> gibbs;
  std::optional<SeededStream> seed;
  DriftReport drift;
};

inline SpectralField step(const SpectralField& state, const ModelParams& params, const IntegratorConfig& config) {
  return GalerkinFlow(params, config).step(state);
}

/// Trajectory on [0, T] with uniform steps (last one shortened); every step is stored.
inline Trajectory evolve(const SpectralField& initial, double T, const ModelParams& params,
                         const IntegratorConfig& config, std::optional<GibbsSpec> gibbs = std::nullopt) {
  if (!(T > 0.0)) throw std::invalid_argument("evolve: T must be > 0");
  const GalerkinFlow flow(params, config);
  Trajectory traj{{0.0}, {initial}, params, config, gibbs, std::nullopt, {}};
  const int N = params.cutoff_N;
  const GibbsSpec spec = gibbs.value_or(GibbsSpec::for_model(params));
  const SpectralField complement0 = project_complement(initial, N);

  DriftReport& d = traj.drift;
  d.initial = conserved_quantity(initial, params);
  const double ld0 = log_density_truncated(project(initial, N), spec, N);

  auto w = flow.make_work(initial);
  double t = 0.0;
  for (double h : flow.step_sizes(T)) {
    flow.step_box(w, h);
    t += h;
    traj.times.push_back(t);
    traj.states.push_back(w.assemble(initial));
    const SpectralField& s = traj.states.back();
    const double q = conserved_quantity(s, params);
    if (d.initial > 0) d.max_relative = std::max(d.max_relative, std::abs(q - d.initial) / d.initial);
    const double ld = log_density_truncated(project(s, N), spec, N);
    if (ld0 != 0) d.log_density_max_relative = std::max(d.log_density_max_relative, std::abs(ld - ld0) / std::abs(ld0));
    d.complement_max_change = std::max(d.complement_max_change, max_abs_diff(project_complement(s, N), complement0));
    d.hermitian_max_defect = std::max(d.hermitian_max_defect, s.hermitian_defect());
  }
  traj.times.back() = T;
  d.final = conserved_quantity(traj.states.back(), params);
  return traj;
}

/// Trace of the Jacobian of B^N in real coordinates (Re psi_k, Im psi_k) over
/// one representative per pair, by central differences.
inline double liouville_divergence(const ModelParams& params, int N, const SpectralField& probe) {
  ModelParams p = params;
  p.cutoff_N = N;
  p.validate_for_dynamics();
  const InteractionTable table(p, N, N);
  const Box box(N);
  std::vector<Complex> x(box.slots()), plus(box.slots()), minus(box.slots());
  for (int a = -N; a <= N; ++a)
    for (int b = -N; b <= N; ++b)
      if (a != 0 || b != 0) x[box.index({a, b})] = probe[{a, b}];

  const auto reps = box.representatives();
  double rms = 0.0;
  for (auto k : reps) rms += std::norm(x[box.index(k)]);
  rms = std::sqrt(rms / (2.0 * static_cast<double>(reps.size())));
  if (rms == 0.0) rms = 1.0;

  double trace = 0.0;
  std::vector<Complex> y(box.slots());
  for (auto k : reps) {
    const std::size_t i = box.index(k), j = box.index(-k);
    for (int part = 0; part < 2; ++part) {
      const Complex xi = x[i];
      const double coord = part == 0 ? xi.real() : xi.imag();
      const double eps = 1e-5 * std::max(std::abs(coord), rms);
      const Complex e = part == 0 ? Complex{eps, 0.0} : Complex{0.0, eps};
      y = x;
      y[i] = xi + e;
      y[j] = std::conj(y[i]);
      table.apply_hermitian(y, plus);
      y[i] = xi - e;
      y[j] = std::conj(y[i]);
      table.apply_hermitian(y, minus);
      const Complex dB = (plus[i] - minus[i]) / (2.0 * eps);
      trace += part == 0 ? dB.real() : dB.imag();
    }
  }
  return trace;
}

/// max_t || Psi(t) - Psi(0) - int_0^t B^N(Psi) ||_{H^s}, composite trapezoid on
/// the stored time grid.
inline double duhamel_residual(const Trajectory& traj, const ModelParams& params, double s = -2.5) {
  if (traj.states.empty()) return 0.0;
  const int N = params.cutoff_N;
  const InteractionTable table(params, N, N);
  std::vector<SpectralField> rhs;
  rhs.reserve(traj.states.size());
  for (const auto& st : traj.states) rhs.push_back(table.apply(project(st, N)));

  SpectralField integral(N, true);
  double worst = 0.0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const double h = traj.times[i] - traj.times[i - 1];
    integral.axpy(0.5 * h, rhs[i - 1]);
    integral.axpy(0.5 * h, rhs[i]);
    SpectralField r = traj.states[i] - traj.states[0];
    r -= integral;
    worst = std::max(worst, std::sqrt(sobolev_norm_sq(r, s)));
  }
  return worst;
}

}  // namespace msqg
