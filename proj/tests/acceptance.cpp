// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 7 11     run a subset
//
// Exit status is 0 only if every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "msqg/msqg.hpp"
#include "test_support.hpp"

using namespace msqg;

namespace {

// Pinned tolerances and sizes.
constexpr double kSymmetryRelTol = 1e-12;
constexpr std::size_t kSymmetryPairs = 100000;
constexpr double kLiouvilleTol = 1e-7;
constexpr double kConservationTol = 1e-9;
constexpr double kRk4RatioLo = 8.0, kRk4RatioHi = 32.0;
constexpr double kRk4Dt = 0.02;
constexpr std::size_t kMomentSamples = 100000;
constexpr double kMomentSe = 5.0;
constexpr std::size_t kInvarianceMembers = 4000;
constexpr double kNegativeControlZ = 6.0;
constexpr std::size_t kExpectationSamples = 5000;
constexpr double kExpectationSe = 3.0;
constexpr double kWickRelTol = 1e-12;
constexpr double kScalingMaxOverMedian = 3.0;
constexpr int kScalingKmax = 64;
constexpr double kTailRatio = 0.5;
constexpr std::size_t kNormMembers = 2000;
constexpr double kNormSe = 4.0;
constexpr double kFastRelTol = 1e-10;
constexpr std::size_t kDeltaPairs = 100000;
constexpr double kDuhamelLo = 3.0, kDuhamelHi = 5.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

ModelParams make(double delta, int N, Formulation f = Formulation::Regularized) {
  ModelParams p;
  p.delta = delta;
  p.cutoff_N = N;
  p.formulation = f;
  return p;
}

IntegratorConfig midpoint(double dt, double tol = 1e-13) {
  IntegratorConfig c;
  c.dt = dt;
  c.fixed_point_tol = tol;
  return c;
}

std::string num(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

// ---------------------------------------------------------------------------

Outcome c01_symmetry() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> d(-32, 32);
  double worst = 0.0;
  std::size_t n = 0;
  for (double delta : {0.25, 0.5, 1.0}) {
    const auto p = make(delta, 32);
    for (std::size_t i = 0; i < kSymmetryPairs; ++i) {
      const LatticeMode k{d(rng), d(rng)}, h{d(rng), d(rng)};
      if (k.is_zero()) continue;
      const double a = alpha(k, h, p), b = alpha(k, k - h, p);
      const double scale = std::max(std::abs(a), std::abs(b));
      if (scale > 0) worst = std::max(worst, std::abs(a - b) / scale);
      ++n;
    }
  }
  return {worst <= kSymmetryRelTol, "max rel err " + num(worst) + " over " + std::to_string(n) + " pairs"};
}

Outcome c02_liouville() {
  double worst = 0.0;
  for (int N : {2, 3}) {
    const auto p = make(0.5, N);
    const auto spec = GibbsSpec::for_model(p);
    for (std::uint64_t i = 0; i < 10; ++i)
      worst = std::max(worst, std::abs(liouville_divergence(p, N, sample_field(spec, N, {202, i}))));
  }
  bool exact = true;
  const auto p = make(0.5, 3);
  for (auto k : Box(3).modes()) {
    exact = exact && alpha(k, k, p) == 0.0;
    exact = exact && alpha_or_zero({0, 0}, k, p) == 0.0;
  }
  return {worst <= kLiouvilleTol && exact,
          "max |trace| " + num(worst) + "; alpha(k,k) = alpha(0,h) = 0 " + (exact ? "exact" : "VIOLATED")};
}

Outcome c03_conservation() {
  const auto p = make(0.5, 6);
  const auto psi = sample_field(GibbsSpec::for_model(p), 6, {303, 0});
  const Trajectory traj = evolve(psi, 1.0, p, midpoint(0.01, 1e-13));
  const double drift = traj.drift.max_relative;

  const double q0 = conserved_quantity(psi, p);
  auto rk4_drift = [&](double dt) {
    IntegratorConfig c;
    c.method = Method::RK4;
    c.dt = dt;
    return std::abs(conserved_quantity(GalerkinFlow(p, c).advance(psi, 1.0), p) - q0) / q0;
  };
  const double ratio = rk4_drift(kRk4Dt) / rk4_drift(kRk4Dt / 2);
  return {drift <= kConservationTol && ratio >= kRk4RatioLo && ratio <= kRk4RatioHi,
          "midpoint H^1 drift " + num(drift) + "; RK4 drift(" + num(kRk4Dt) + ")/drift(" + num(kRk4Dt / 2) + ") = " + num(ratio)};
}

Outcome c04_moments() {
  const int N = 8;
  const auto spec = GibbsSpec::for_model(make(0.5, N), CovarianceLaw::MomentTable);
  const auto modes = Box(N).modes();
  // cross pairs: each mode with its right and upper neighbour and with (1,0)
  std::vector<std::pair<LatticeMode, LatticeMode>> pairs;
  for (auto k : modes)
    for (LatticeMode q : {k + LatticeMode{1, 0}, k + LatticeMode{0, 1}, LatticeMode{1, 0}})
      if (!q.is_zero() && q.box_norm() <= N && q != k && q != -k) pairs.emplace_back(k, q);

  std::vector<RunningStats> power(modes.size());
  std::vector<std::array<RunningStats, 4>> cross(pairs.size());
  const Box box(N);
  const SeededStream root{404, 0};
  for (std::size_t i = 0; i < kMomentSamples; ++i) {
    const SpectralField f = sample_field(spec, N, root.child(i));
    for (std::size_t j = 0; j < modes.size(); ++j) power[j].add(std::norm(f[modes[j]]));
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const Complex a = f[pairs[j].first], b = f[pairs[j].second];
      const Complex ab = a * b, abar = a * std::conj(b);
      cross[j][0].add(ab.real());
      cross[j][1].add(ab.imag());
      cross[j][2].add(abar.real());
      cross[j][3].add(abar.imag());
    }
  }
  double worst_power = 0.0, worst_cross = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto s = power[j].stats();
    worst_power = std::max(worst_power, std::abs(s.mean - 2.0 / std::pow(modes[j].norm_sq(), 2.0)) / s.se);
  }
  for (const auto& c : cross)
    for (const auto& r : c) {
      const auto s = r.stats();
      worst_cross = std::max(worst_cross, std::abs(s.mean) / s.se);
    }
  return {worst_power <= kMomentSe && worst_cross <= kMomentSe,
          "max |z| of E|psi_k|^2 vs 2/|k|^4 over " + std::to_string(modes.size()) + " modes " + num(worst_power) +
              "; max |z| of " + std::to_string(4 * pairs.size()) + " cross moments " + num(worst_cross)};
}

Outcome c05_invariance() {
  const auto p = make(0.5, 4);
  const auto panel = ObservablePanel::default_panel();
  const std::vector<double> times{0.25, 0.5, 1.0};
  const auto good = run_invariance_experiment(p, times, kInvarianceMembers, panel, midpoint(0.01), {505, 0},
                                              std::nullopt, FlowVariant::Truncated, worker_threads());
  const auto bad = run_invariance_experiment(p, times, kInvarianceMembers, panel, midpoint(0.01), {505, 0},
                                             std::nullopt, FlowVariant::SkipInnerProjection, worker_threads());
  const bool pass = good.pass && !bad.pass && bad.max_abs_z > kNegativeControlZ;
  return {pass, "panel " + std::to_string(panel.size()) + " x " + std::to_string(times.size()) +
                    " times: max|z| " + num(good.max_abs_z) + ", min KS p " + num(good.min_ks_p) + " (family " +
                    num(good.ks_threshold) + "); negative control max|z| " + num(bad.max_abs_z) +
                    (bad.pass ? " (battery passed: BAD)" : " (battery failed)")};
}

Outcome c06_expectation() {
  std::ostringstream msg;
  bool pass = true;
  for (double delta : {0.5, 1.0}) {
    const auto p = make(delta, 6);
    const auto spec = GibbsSpec::for_model(p);
    const double analytic = expectation_B_analytic(6, -2.5, p, spec);
    const auto mc = expectation_B_monte_carlo(6, -2.5, p, spec, kExpectationSamples, {606, 0}, worker_threads());
    const double z = (mc.estimate - analytic) / mc.standard_error;
    pass = pass && std::abs(z) <= kExpectationSe;
    msg << "delta " << delta << ": MC " << num(mc.estimate) << " vs " << num(analytic) << " (z " << num(z) << "); ";
  }
  double worst = 0.0;
  for (double delta : {0.5, 1.0}) {
    const auto p = make(delta, 1);
    const auto spec = GibbsSpec::for_model(p);
    const double oracle = testing_support::wick_oracle(1, -2.5, p, spec);
    worst = std::max(worst, std::abs(expectation_B_analytic(1, -2.5, p, spec) - oracle) / oracle);
  }
  pass = pass && worst <= kWickRelTol;
  msg << "N=1 Wick rel err " << num(worst);
  return {pass, msg.str()};
}

Outcome c07_scaling() {
  std::ostringstream msg;
  bool pass = true;
  for (double delta : {0.25, 0.5, 1.0}) {
    const ScalingReport r = scaling_check(-2.5, delta, kScalingKmax);
    const bool bounded = r.max_over_median <= kScalingMaxOverMedian;
    const bool no_growth = r.upper_half_loglog_slope <= 0.0 && r.last_over_median <= 2.0;
    pass = pass && bounded && no_growth;
    msg << "delta " << delta << ": sup " << num(r.sup) << " at |k|=" << r.argmax << ", max/median "
        << num(r.max_over_median) << ", upper-half slope " << num(r.upper_half_loglog_slope) << "; ";
  }
  return {pass, msg.str()};
}

Outcome c08_divergence() {
  // increments S(2R) - S(R) for R = 64..512
  const std::vector<int> radii{64, 128, 256, 512, 1024};
  const SumReport zero = inner_sum({1, 0}, 0.0, radii);
  const SumReport half = inner_sum({1, 0}, 0.5, radii);
  const auto inc = zero.increments();
  const auto [lo, hi] = std::minmax_element(inc.begin(), inc.end());
  double min_factor = HUGE_VAL;
  for (std::size_t i = 0; i < inc.size(); ++i) min_factor = std::min(min_factor, inc[i] / zero.reference_increments[i]);
  return {zero.verdict == SumVerdict::LogDivergent && half.verdict == SumVerdict::Converged,
          "delta 0: " + std::string(to_string(zero.verdict)) + " (increment band " + num(*hi / *lo) +
              ", min ratio to delta=1 " + num(min_factor) + "); delta 0.5: " + std::string(to_string(half.verdict))};
}

Outcome c09_tail() {
  const auto p = make(0.5, 24);
  const auto spec = GibbsSpec::for_model(p);
  const double v4 = galerkin_tail(4, 24, -2.5, p, spec);
  const double v8 = galerkin_tail(8, 24, -2.5, p, spec);
  const double v16 = galerkin_tail(16, 24, -2.5, p, spec);
  return {v4 > v8 && v8 > v16 && v16 / v4 <= kTailRatio,
          "tail(4,8,16) = " + num(v4) + ", " + num(v8) + ", " + num(v16) + "; ratio " + num(v16 / v4)};
}

Outcome c10_norm_bounds() {
  const auto r =
      trajectory_norm_bounds(make(1.0, 4), 1.0, -2.5, kNormMembers, midpoint(0.01), {1010, 0}, std::nullopt,
                             worker_threads(), kNormSe);
  return {r.state.pass && r.derivative.pass,
          "state " + num(r.state.lhs) + " vs " + num(r.state.rhs) + " (z " + num(r.state.z) + "); derivative " +
              num(r.derivative.lhs) + " vs " + num(r.derivative.rhs) + " (z " + num(r.derivative.z) + ")"};
}

Outcome c11_fast_path() {
  const auto p = make(0.5, 16);
  const auto spec = GibbsSpec::for_model(p);
  FastNonlinearity op(p);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto psi = sample_field(spec, 16, {1111, i});
    const auto direct = truncated_nonlinearity(psi, p);
    worst = std::max(worst, max_abs_diff(direct, op(psi)) / max_abs(direct));
  }
  return {worst <= kFastRelTol, "max rel diff " + num(worst) + " over 100 fields"};
}

Outcome c12_delta_difference() {
  double worst = 0.0;
  for (double delta : {0.25, 0.5, 1.0})
    worst = std::max(worst, delta_difference_bound(delta, kDeltaPairs, {1212, 0}).worst_ratio);
  return {worst <= 1.0, "worst ratio " + num(worst)};
}

Outcome c13_threshold() {
  std::vector<double> grid;
  for (double s = -5.0; s <= 0.01; s += 0.25) grid.push_back(s);
  const auto scan = streamline_threshold_scan(1.0, grid, 64);
  auto verdict_at = [&](double s) {
    for (const auto& r : scan.rederived.rows)
      if (std::abs(r.s - s) < 1e-9) return r.verdict;
    return GrowthVerdict::Growing;
  };
  const bool reported = scan.rederived.empirical_threshold && scan.appendix_literal.empirical_threshold;
  const bool pass = verdict_at(-4.0) == GrowthVerdict::Converged && verdict_at(0.0) == GrowthVerdict::Growing && reported;
  auto thr = [](const std::optional<double>& t) { return t ? num(*t) : std::string("none"); };
  return {pass, "s=-4 " + std::string(to_string(verdict_at(-4.0))) + ", s=0 " +
                    std::string(to_string(verdict_at(0.0))) + "; empirical threshold re-derived " +
                    thr(scan.rederived.empirical_threshold) + ", appendix-literal " +
                    thr(scan.appendix_literal.empirical_threshold) + " vs claimed " + num(scan.claimed_threshold) +
                    " (scaling predicts " + num(scan.rederived.predicted_threshold) + " / " +
                    num(scan.appendix_literal.predicted_threshold) + ")"};
}

Outcome c14_duhamel() {
  const auto p = make(1.0, 4);
  const auto psi = sample_field(GibbsSpec::for_model(p), 4, {1414, 0});
  const Trajectory a = evolve(psi, 1.0, p, midpoint(0.01));
  const Trajectory b = evolve(psi, 1.0, p, midpoint(0.005));
  const double ra = duhamel_residual(a, p), rb = duhamel_residual(b, p);
  Trajectory start = a;
  start.states.resize(1);
  start.times.resize(1);
  const double r0 = duhamel_residual(start, p);
  const double ratio = ra / rb;
  return {ratio >= kDuhamelLo && ratio <= kDuhamelHi && r0 == 0.0,
          "residual(dt=0.01) " + num(ra) + ", residual(dt=0.005) " + num(rb) + ", ratio " + num(ratio) +
              "; t=0 residual " + num(r0)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "coefficient symmetry", 1, c01_symmetry},
      {2, "Liouville", 5, c02_liouville},
      {3, "conservation", 30, c03_conservation},
      {4, "Gibbs moments", 30, c04_moments},
      {5, "measure invariance", 600, c05_invariance},
      {6, "expectation identity", 300, c06_expectation},
      {7, "scaling bound", 120, c07_scaling},
      {8, "delta=0 breakdown", 120, c08_divergence},
      {9, "Galerkin tail", 300, c09_tail},
      {10, "trajectory-norm identities", 600, c10_norm_bounds},
      {11, "fast path", 10, c11_fast_path},
      {12, "difference lemma bound", 5, c12_delta_difference},
      {13, "streamline threshold", 300, c13_threshold},
      {14, "Duhamel residual", 30, c14_duhamel},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::printf("[%s] C%02d %s: %s [%.2f s of %.0f s budget%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
