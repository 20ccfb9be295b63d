#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msqg/expectation.hpp"
#include "msqg/flow.hpp"
#include "msqg/gibbs.hpp"
#include "msqg/parallel.hpp"
#include "msqg/statistics.hpp"

namespace msqg {

struct Observable {
  std::string name;
  std::function<double(const SpectralField&)> fn;
};

class ObservablePanel {
 public:
  ObservablePanel& add(std::string name, std::function<double(const SpectralField&)> fn) {
    items_.push_back({std::move(name), std::move(fn)});
    return *this;
  }

  /// Re psi_k, Im psi_k and |psi_k|^2.
  ObservablePanel& add_mode(LatticeMode k) {
    const std::string tag = "(" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")";
    add("re" + tag, [k](const SpectralField& f) { return f[k].real(); });
    add("im" + tag, [k](const SpectralField& f) { return f[k].imag(); });
    return add_power(k);
  }

  ObservablePanel& add_power(LatticeMode k) {
    const std::string tag = "(" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")";
    return add("abs2" + tag, [k](const SpectralField& f) { return std::norm(f[k]); });
  }

  ObservablePanel& add_norm(double sigma) {
    return add("hnorm2(" + format_real(sigma) + ")", [sigma](const SpectralField& f) { return sobolev_norm_sq(f, sigma); });
  }

  /// cos(c Re psi_k), a bounded observable.
  ObservablePanel& add_cos(LatticeMode k, double c = 1.0) {
    const std::string tag = "(" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")";
    return add("cos" + tag + "x" + format_real(c), [k, c](const SpectralField& f) { return std::cos(c * f[k].real()); });
  }

  /// Twenty observables: Re/Im/|.|^2 at (1,0),(0,1),(1,1),(2,1); H^sigma norms at
  /// sigma = -2.5, -3; cos(Re psi) at (1,0),(1,1); |.|^2 at (3,0),(2,2),(4,1),(3,3).
  static ObservablePanel default_panel() {
    ObservablePanel p;
    for (LatticeMode k : {LatticeMode{1, 0}, LatticeMode{0, 1}, LatticeMode{1, 1}, LatticeMode{2, 1}}) p.add_mode(k);
    p.add_norm(-2.5).add_norm(-3.0);
    p.add_cos({1, 0}).add_cos({1, 1});
    for (LatticeMode k : {LatticeMode{3, 0}, LatticeMode{2, 2}, LatticeMode{4, 1}, LatticeMode{3, 3}}) p.add_power(k);
    return p;
  }

  std::size_t size() const { return items_.size(); }
  const Observable& operator[](std::size_t i) const { return items_[i]; }
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& o : items_) n.push_back(o.name);
    return n;
  }

  std::vector<double> evaluate(const SpectralField& f) const {
    std::vector<double> v;
    v.reserve(items_.size());
    for (const auto& o : items_) v.push_back(o.fn(f));
    return v;
  }

 private:
  static std::string format_real(double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  std::vector<Observable> items_;
};

/// Pre-registered decision thresholds.
struct InvarianceThresholds {
  double z_max = 4.0;               // every |z| must stay at or below this
  double family_alpha = 0.01;       // KS family level, Bonferroni-split over all tests
  double max_failure_rate = 1e-3;   // members lost to NonConvergence before the run is invalid
};

struct ObservableResult {
  std::string name;
  double time = 0.0;
  double mean = 0.0;       // ensemble mean at this time
  double variance = 0.0;
  double se = 0.0;
  double mean0 = 0.0;      // ensemble mean at t = 0
  double diff_mean = 0.0;  // mean of paired differences F(Psi(t)) - F(psi)
  double diff_se = 0.0;
  double z = 0.0;
  double p_adjusted = 1.0;  // Bonferroni-adjusted two-sided p of z
  double ks_statistic = 0.0;
  double ks_p = 1.0;
  bool z_pass = true;
  bool ks_pass = true;
};

struct EnsembleReport {
  int N = 0;
  double delta = 0.0;
  std::vector<double> times;
  std::size_t members = 0;
  std::size_t members_failed = 0;
  SeededStream stream;
  FlowVariant variant = FlowVariant::Truncated;
  IntegratorConfig config;
  GibbsSpec spec;
  InvarianceThresholds thresholds;
  std::vector<std::string> observables;
  std::vector<ObservableResult> results;  // time-major, observable-minor
  std::size_t tests = 0;                  // number of (observable, time) pairs
  double ks_threshold = 0.0;              // family_alpha / tests
  double max_abs_z = 0.0;
  double min_ks_p = 1.0;
  double max_conserved_drift = 0.0;       // max relative H^c drift of the box part over all members
  bool valid = true;                      // failure rate within tolerance
  bool pass = true;
};

namespace detail {

struct MemberOutcome {
  bool failed = false;
  std::vector<std::vector<double>> values;  // [time index incl. t=0][observable]
  double drift = 0.0;
};

}  // namespace detail

/// Draws M members of rho_N (complement frozen and sampled out to box 2N),
/// evolves each to the listed times and compares the panel at every time with
/// t = 0: paired z-tests and two-sample KS tests.
inline EnsembleReport run_invariance_experiment(const ModelParams& params, std::vector<double> times, std::size_t M,
                                                const ObservablePanel& panel, const IntegratorConfig& config,
                                                const SeededStream& stream, std::optional<GibbsSpec> gibbs = std::nullopt,
                                                FlowVariant variant = FlowVariant::Truncated, unsigned threads = 1,
                                                const InvarianceThresholds& thresholds = {}) {
  params.validate_for_dynamics();
  if (M < 100) throw std::invalid_argument("run_invariance_experiment: need M >= 100");
  if (panel.size() == 0) throw std::invalid_argument("run_invariance_experiment: empty panel");
  for (double t : times)
    if (!(t >= 0.0)) throw std::invalid_argument("run_invariance_experiment: times must be >= 0");
  std::sort(times.begin(), times.end());

  const int N = params.cutoff_N;
  const GibbsSpec spec = gibbs.value_or(GibbsSpec::for_model(params));
  const GalerkinFlow flow(params, config, variant, 2 * N);

  std::vector<detail::MemberOutcome> out(M);
  parallel_for(M, threads, [&](std::size_t i) {
    auto& o = out[i];
    SpectralField state = sample_field(spec, N, stream.child(2 * i)).with_extent(2 * N);
    state += sample_complement(spec, N, 2 * N, stream.child(2 * i + 1));
    o.values.push_back(panel.evaluate(state));
    const double q0 = conserved_quantity(state, params);
    double t = 0.0;
    try {
      for (double target : times) {
        state = flow.advance(state, target - t);
        t = target;
        o.values.push_back(panel.evaluate(state));
        if (q0 > 0) o.drift = std::max(o.drift, std::abs(conserved_quantity(state, params) - q0) / q0);
      }
    } catch (const NonConvergence&) {
      o.failed = true;
    }
  });

  EnsembleReport rep;
  rep.N = N;
  rep.delta = params.delta;
  rep.times = times;
  rep.members = M;
  rep.stream = stream;
  rep.variant = variant;
  rep.config = config;
  rep.spec = spec;
  rep.thresholds = thresholds;
  rep.observables = panel.names();

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < M; ++i) {
    if (out[i].failed)
      ++rep.members_failed;
    else
      ok.push_back(i);
  }
  rep.valid = static_cast<double>(rep.members_failed) <= thresholds.max_failure_rate * static_cast<double>(M) &&
              ok.size() >= 30;
  for (auto i : ok) rep.max_conserved_drift = std::max(rep.max_conserved_drift, out[i].drift);

  rep.tests = times.size() * panel.size();
  rep.ks_threshold = rep.tests ? thresholds.family_alpha / static_cast<double>(rep.tests) : 0.0;
  if (!rep.valid) {
    rep.pass = false;
    return rep;
  }

  const std::size_t n = ok.size();
  std::vector<double> base(n), now(n), diff(n);
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    for (std::size_t j = 0; j < panel.size(); ++j) {
      for (std::size_t m = 0; m < n; ++m) {
        base[m] = out[ok[m]].values[0][j];
        now[m] = out[ok[m]].values[ti + 1][j];
        diff[m] = now[m] - base[m];
      }
      const SampleStats s0 = describe(base), st = describe(now), sd = describe(diff);
      ObservableResult r;
      r.name = panel[j].name;
      r.time = times[ti];
      r.mean = st.mean;
      r.variance = st.variance;
      r.se = st.se;
      r.mean0 = s0.mean;
      r.diff_mean = sd.mean;
      r.diff_se = sd.se;
      r.z = sd.se > 0.0 ? sd.mean / sd.se : (sd.mean == 0.0 ? 0.0 : std::copysign(HUGE_VAL, sd.mean));
      r.p_adjusted = std::min(1.0, normal_two_sided_p(r.z) * static_cast<double>(rep.tests));
      const KsResult ks = two_sample_test(base, now);
      r.ks_statistic = ks.statistic;
      r.ks_p = ks.p_value;
      r.z_pass = std::abs(r.z) <= thresholds.z_max;
      r.ks_pass = r.ks_p >= rep.ks_threshold;
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(r.z));
      rep.min_ks_p = std::min(rep.min_ks_p, r.ks_p);
      rep.pass = rep.pass && r.z_pass && r.ks_pass;
      rep.results.push_back(std::move(r));
    }
  return rep;
}

// ---------------------------------------------------------------------------

struct NormBoundResult {
  double lhs = 0.0;  // ensemble mean of the time integral
  double se = 0.0;
  double rhs = 0.0;  // T times the stationary expectation
  double z = 0.0;
  bool pass = false;
};

struct TrajectoryNormReport {
  double T = 0.0;
  double sigma = 0.0;
  std::size_t members = 0;
  NormBoundResult state;       // int_0^T ||Pi_N Psi||^2_{H^sigma}  vs  T E||psi||^2_{H^sigma}
  NormBoundResult derivative;  // int_0^T ||B^N(Psi)||^2_{H^sigma}  vs  T E||B^N||^2_{H^sigma}
};

/// Time integrals of ||Psi||^2 and ||d/dt Psi||^2 in H^sigma (trapezoid on the
/// step grid) averaged over M members, against T times the rho expectations.
/// Under invariance the trapezoid weights sum to T, so both sides agree exactly
/// in expectation.
inline TrajectoryNormReport trajectory_norm_bounds(const ModelParams& params, double T, double sigma, std::size_t M,
                                                   const IntegratorConfig& config, const SeededStream& stream,
                                                   std::optional<GibbsSpec> gibbs = std::nullopt, unsigned threads = 1,
                                                   double se_factor = 4.0) {
  params.validate_for_dynamics();
  if (!(sigma < -2.0)) throw std::invalid_argument("trajectory_norm_bounds: sigma must be < -2");
  if (!(T > 0.0)) throw std::invalid_argument("trajectory_norm_bounds: T must be > 0");
  if (M < 100) throw std::invalid_argument("trajectory_norm_bounds: need M >= 100");
  const int N = params.cutoff_N;
  const GibbsSpec spec = gibbs.value_or(GibbsSpec::for_model(params));
  const GalerkinFlow flow(params, config);
  const std::vector<double> steps = flow.step_sizes(T);

  std::vector<double> a(M), b(M);
  parallel_for(M, threads, [&](std::size_t i) {
    const SpectralField psi = sample_field(spec, N, stream.child(i));
    auto w = flow.make_work(psi);
    SpectralField rate(N, true);
    auto norms = [&](double& x, double& y) {
      flow.rhs(w, w.y, rate.data());
      SpectralField box = w.assemble(psi);
      x = sobolev_norm_sq(box, sigma);
      y = sobolev_norm_sq(rate, sigma);
    };
    double x0, y0;
    norms(x0, y0);
    double ia = 0.0, ib = 0.0;
    for (double h : steps) {
      flow.step_box(w, h);
      double x1, y1;
      norms(x1, y1);
      ia += 0.5 * h * (x0 + x1);
      ib += 0.5 * h * (y0 + y1);
      x0 = x1;
      y0 = y1;
    }
    a[i] = ia;
    b[i] = ib;
  });

  auto judge = [&](const std::vector<double>& v, double rhs) {
    const SampleStats s = describe(v);
    NormBoundResult r;
    r.lhs = s.mean;
    r.se = s.se;
    r.rhs = rhs;
    r.z = s.se > 0 ? (s.mean - rhs) / s.se : 0.0;
    r.pass = std::abs(s.mean - rhs) <= se_factor * s.se;
    return r;
  };
  TrajectoryNormReport rep;
  rep.T = T;
  rep.sigma = sigma;
  rep.members = M;
  rep.state = judge(a, T * expected_sobolev_norm_sq(spec, N, sigma));
  rep.derivative = judge(b, T * expectation_B_analytic(N, sigma, params, spec));
  return rep;
}

}  // namespace msqg
