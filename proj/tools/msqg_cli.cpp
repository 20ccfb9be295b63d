// msqg_cli: sampling, evolution, expectation and invariance experiments for
// the modified SQG family. See README.md for the config file format.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msqg/msqg.hpp"

namespace fs = std::filesystem;
using namespace msqg;

namespace {

enum ExitCode { kPass = 0, kStatFail = 2, kNumericFail = 3, kBadConfig = 4 };

struct RunConfig {
  // global
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  std::string out = "msqg_out";
  std::string formulation = "regularized";
  std::string covariance = "enstrophy";
  double delta = 0.5;
  int N = 4;

  // integrator
  std::string method = "implicit-midpoint";
  double dt = 0.01;
  double tol = 1e-13;
  int max_iters = 100;

  // coefficients
  std::vector<std::string> k_list;
  int k_max = 0;
  int h_max = 4;

  // sample
  std::size_t M_sample = 1000;
  std::size_t snapshots = 4;
  std::string sampling = "hermitian";
  double sample_se_factor = 5.0;

  // evolve
  double T = 1.0;
  std::string init = "gibbs";

  // expectation
  std::vector<std::string> sum_k = {"1,0"};
  std::vector<int> radii = {64, 128, 256, 512, 1024};
  std::vector<double> sum_deltas = {0.0, 0.5, 1.0};
  std::vector<double> s_list = {-2.5};
  std::size_t M_expect = 5000;
  double expect_se_factor = 3.0;
  int scaling_kmax = 0;
  std::vector<double> threshold_s;
  int threshold_kmax = 32;

  // invariance
  std::vector<double> times = {0.25, 0.5, 1.0};
  std::size_t M_inv = 4000;
  bool bug_switch = false;
  double z_max = 4.0;
  double family_alpha = 0.01;
  double max_failure_rate = 1e-3;
};

ModelParams model(const RunConfig& c) {
  ModelParams p;
  p.delta = c.delta;
  p.formulation = parse_formulation(c.formulation);
  p.cutoff_N = c.N;
  p.validate();
  return p;
}

IntegratorConfig integrator(const RunConfig& c) {
  IntegratorConfig ic;
  ic.method = parse_method(c.method);
  ic.dt = c.dt;
  ic.fixed_point_tol = c.tol;
  ic.max_fixed_point_iters = c.max_iters;
  ic.validate();
  return ic;
}

LatticeMode parse_mode(const std::string& s) {
  std::istringstream is(s);
  int a = 0, b = 0;
  char comma = 0;
  if (!(is >> a >> comma >> b) || comma != ',') throw std::invalid_argument("bad mode '" + s + "' (expected k1,k2)");
  return {a, b};
}

struct Outputs {
  fs::path dir;
  std::string config_text;
  std::string config_hash;
  json files = json::array();

  fs::path add(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

std::string file_hash(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

void write_manifest(const Outputs& o, const std::string& command, int code, const json& summary) {
  json files = json::array();
  for (const auto& f : o.files) files.push_back({{"name", f}, {"fnv1a64", file_hash(o.dir / f.get<std::string>())}});
  write_json(o.dir / "run_manifest.json", {{"command", command},
                                           {"config", o.config_text},
                                           {"config_hash", o.config_hash},
                                           {"exit_code", code},
                                           {"outputs", files},
                                           {"summary", summary}});
}

// ---------------------------------------------------------------------------

int cmd_coefficients(const RunConfig& c, Outputs& o) {
  ModelParams p;
  p.delta = c.delta;
  p.formulation = parse_formulation(c.formulation);
  p.validate();
  if (c.k_max < 0 || c.h_max < 0) throw std::invalid_argument("coefficients: window bounds must be >= 0");
  std::vector<LatticeMode> ks;
  for (const auto& s : c.k_list) ks.push_back(parse_mode(s));
  for (int a = -c.k_max; a <= c.k_max; ++a)
    for (int b = -c.k_max; b <= c.k_max; ++b)
      if (a != 0 || b != 0) ks.push_back({a, b});
  for (auto k : ks)
    if (k.is_zero()) throw std::invalid_argument("coefficients: k must be nonzero");

  auto os = open_out(o.add("coefficients.csv"));
  os << "k1,k2,h1,h2,alpha,alpha_k_kmh\n";
  std::size_t rows = 0;
  for (auto k : ks)
    for (int a = -c.h_max; a <= c.h_max; ++a)
      for (int b = -c.h_max; b <= c.h_max; ++b) {
        const LatticeMode h{a, b};
        os << k.k1 << ',' << k.k2 << ',' << a << ',' << b << ',' << fmt17(alpha(k, h, p)) << ','
           << fmt17(alpha(k, k - h, p)) << '\n';
        ++rows;
      }
  write_manifest(o, "coefficients", kPass, {{"rows", rows}});
  return kPass;
}

int cmd_sample(const RunConfig& c, Outputs& o) {
  const ModelParams p = model(c);
  const GibbsSpec spec = GibbsSpec::for_model(p, parse_covariance_law(c.covariance));
  if (c.M_sample < 2) throw std::invalid_argument("sample: M must be >= 2");
  const SamplingMode mode = c.sampling == "independent" ? SamplingMode::IndependentComplex
                            : c.sampling == "hermitian" ? SamplingMode::Hermitian
                                                        : throw std::invalid_argument("sample: unknown sampling mode");
  const SeededStream stream{c.seed, 0};
  const Box box(p.cutoff_N);
  const auto modes = box.modes();
  std::vector<std::vector<double>> power(modes.size(), std::vector<double>(c.M_sample));
  std::vector<SpectralField> kept(std::min(c.snapshots, c.M_sample));
  parallel_for(c.M_sample, c.threads, [&](std::size_t i) {
    const SpectralField f = sample_field(spec, p.cutoff_N, stream.child(i), mode);
    for (std::size_t j = 0; j < modes.size(); ++j) power[j][i] = std::norm(f[modes[j]]);
    if (i < kept.size()) kept[i] = f;
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%05zu.bin", i);
    save_snapshot(o.add(name).string(), kept[i], p.cutoff_N, p);
  }
  auto os = open_out(o.add("moments.csv"));
  os << "k1,k2,mean_abs2,se,expected,z\n";
  double worst = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const SampleStats s = describe(power[j]);
    const double expected = covariance(modes[j], spec);
    const double z = (s.mean - expected) / s.se;
    worst = std::max(worst, std::abs(z));
    os << modes[j].k1 << ',' << modes[j].k2 << ',' << fmt17(s.mean) << ',' << fmt17(s.se) << ',' << fmt17(expected)
       << ',' << fmt17(z) << '\n';
  }
  os.close();
  const int code = worst <= c.sample_se_factor ? kPass : kStatFail;
  write_manifest(o, "sample", code,
                 {{"modes", modes.size()}, {"samples", c.M_sample}, {"max_abs_z", worst}, {"gibbs", to_json(spec)}});
  return code;
}

int cmd_evolve(const RunConfig& c, Outputs& o) {
  const ModelParams p = model(c);
  const IntegratorConfig ic = integrator(c);
  const GibbsSpec spec = GibbsSpec::for_model(p, parse_covariance_law(c.covariance));
  SpectralField init;
  std::optional<SeededStream> seed;
  if (c.init == "gibbs") {
    seed = SeededStream{c.seed, 0};
    init = sample_field(spec, p.cutoff_N, *seed);
  } else if (c.init == "zero") {
    init = SpectralField(p.cutoff_N, true);
  } else {
    init = load_snapshot(c.init).field;
  }
  Trajectory traj;
  try {
    traj = evolve(init, c.T, p, ic, spec);
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    write_manifest(o, "evolve", kNumericFail, {{"error", e.what()}});
    return kNumericFail;
  }
  traj.seed = seed;
  const double residual = duhamel_residual(traj, p);
  save_trajectory(o.dir / "trajectory", traj, {{"config_hash", o.config_hash}});
  o.files.push_back("trajectory/trajectory.json");
  json drift = to_json(traj.drift);
  drift["duhamel_residual"] = residual;
  drift["config_hash"] = o.config_hash;
  write_json(o.add("drift.json"), drift);
  write_manifest(o, "evolve", kPass, drift);
  return kPass;
}

int cmd_expectation(const RunConfig& c, Outputs& o) {
  ModelParams p;
  p.delta = c.delta;
  p.formulation = parse_formulation(c.formulation);
  p.cutoff_N = c.N;
  p.validate();
  json summary;

  {
    auto os = open_out(o.add("sums.csv"));
    write_sum_csv_header(os);
    json verdicts = json::array();
    for (const auto& ks : c.sum_k)
      for (double d : c.sum_deltas) {
        const SumReport r = inner_sum(parse_mode(ks), d, c.radii);
        write_sum_csv_rows(os, r);
        verdicts.push_back({{"k", ks}, {"delta", d}, {"verdict", std::string(to_string(r.verdict))},
                            {"tail_bound", std::isfinite(r.tail_bound) ? json(r.tail_bound) : json(nullptr)}});
      }
    summary["sums"] = verdicts;
  }

  int code = kPass;
  if (p.delta > 0.0) {
    const GibbsSpec spec = GibbsSpec::for_model(p, parse_covariance_law(c.covariance));
    auto os = open_out(o.add("expectation.csv"));
    write_expectation_csv_header(os);
    json rows = json::array();
    for (double s : c.s_list) {
      const double analytic = expectation_B_analytic(c.N, s, p, spec);
      MonteCarloEstimate mc;
      if (c.M_expect > 0) {
        mc = expectation_B_monte_carlo(c.N, s, p, spec, c.M_expect, {c.seed, 1}, c.threads);
        if (std::abs(mc.estimate - analytic) > c.expect_se_factor * mc.standard_error) code = kStatFail;
      }
      write_expectation_csv_row(os, c.N, s, p.delta, analytic, mc);
      rows.push_back({{"s", s}, {"analytic", analytic}, {"mc", mc.estimate}, {"se", mc.standard_error}});
    }
    summary["expectation"] = rows;
  }

  if (c.scaling_kmax > 0) {
    const ScalingReport r = scaling_check(c.s_list.front(), c.delta, c.scaling_kmax);
    auto os = open_out(o.add("scaling.csv"));
    write_csv(os, r);
    summary["scaling"] = {{"sup", r.sup}, {"argmax", r.argmax}, {"max_over_median", r.max_over_median},
                          {"upper_half_loglog_slope", r.upper_half_loglog_slope}};
  }
  if (!c.threshold_s.empty()) {
    const ThresholdScan scan = streamline_threshold_scan(c.delta, c.threshold_s, c.threshold_kmax);
    auto os = open_out(o.add("threshold.csv"));
    write_csv(os, scan);
    summary["threshold"] = to_json(scan);
  }
  summary["config_hash"] = o.config_hash;
  write_json(o.add("expectation.json"), summary);
  write_manifest(o, "expectation", code, summary);
  return code;
}

int cmd_invariance(const RunConfig& c, Outputs& o) {
  const ModelParams p = model(c);
  p.validate_for_dynamics();
  const IntegratorConfig ic = integrator(c);
  const GibbsSpec spec = GibbsSpec::for_model(p, parse_covariance_law(c.covariance));
  InvarianceThresholds th;
  th.z_max = c.z_max;
  th.family_alpha = c.family_alpha;
  th.max_failure_rate = c.max_failure_rate;
  const EnsembleReport rep = run_invariance_experiment(
      p, c.times, c.M_inv, ObservablePanel::default_panel(), ic, {c.seed, 2}, spec,
      c.bug_switch ? FlowVariant::SkipInnerProjection : FlowVariant::Truncated, c.threads, th);
  json j = to_json(rep);
  j["config_hash"] = o.config_hash;
  write_json(o.add("ensemble_report.json"), j);
  {
    auto os = open_out(o.add("ensemble_report.csv"));
    write_csv(os, rep);
  }
  const int code = !rep.valid ? kNumericFail : rep.pass ? kPass : kStatFail;
  write_manifest(o, "invariance", code, j["decisions"]);
  std::cout << "invariance: " << (rep.pass ? "PASS" : "FAIL") << " max|z|=" << fmt17(rep.max_abs_z)
            << " min KS p=" << fmt17(rep.min_ks_p) << " failed members=" << rep.members_failed << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs-measure experiments for the inviscid modified SQG family"};
  app.set_config("--config", "", "TOML config file (flags override)");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  RunConfig c;

  app.add_option("--seed", c.seed, "Master seed");
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--formulation", c.formulation, "regularized | streamline")
      ->check(CLI::IsMember({"regularized", "streamline"}));
  app.add_option("--covariance", c.covariance, "enstrophy | moment-table")
      ->check(CLI::IsMember({"enstrophy", "moment-table"}));
  app.add_option("--delta", c.delta, "Smoothing exponent in [0,1]");
  app.add_option("-N,--cutoff", c.N, "Box cutoff N");

  auto add_integrator = [&](CLI::App* sub) {
    sub->add_option("--method", c.method, "implicit-midpoint | rk4");
    sub->add_option("--dt", c.dt, "Time step");
    sub->add_option("--tol", c.tol, "Fixed-point tolerance (relative to max(1, |y|))");
    sub->add_option("--max-iters", c.max_iters, "Fixed-point iteration cap");
  };

  auto* coef = app.add_subcommand("coefficients", "CSV of alpha_{k,h} over an index window");
  coef->add_option("--k", c.k_list, "Explicit modes k as k1,k2 (repeatable)");
  coef->add_option("--k-max", c.k_max, "Also every nonzero k with |k|_inf <= K");
  coef->add_option("--h-max", c.h_max, "h ranges over |h|_inf <= H");

  auto* samp = app.add_subcommand("sample", "Draw from the Gaussian measure, write snapshots and moments");
  samp->add_option("-M,--samples", c.M_sample, "Number of draws");
  samp->add_option("--snapshots", c.snapshots, "How many draws to store as snapshots");
  samp->add_option("--sampling", c.sampling, "hermitian | independent");
  samp->add_option("--se-factor", c.sample_se_factor, "Moment tolerance in standard errors");

  auto* evo = app.add_subcommand("evolve", "Integrate the truncated flow and report drift");
  evo->add_option("-T,--time", c.T, "Final time");
  evo->add_option("--init", c.init, "gibbs | zero | path to a snapshot");
  add_integrator(evo);

  auto* exp = app.add_subcommand("expectation", "Lattice sums and the expectation of B^N");
  exp->add_option("--sum-k", c.sum_k, "Modes for the inner sum diagnostic");
  exp->add_option("--radii", c.radii, "Increasing max-norm radii")
        ->delimiter(',');
  exp->add_option("--sum-deltas", c.sum_deltas, "delta values for the inner sum diagnostic")
        ->delimiter(',');
  exp->add_option("-s,--s", c.s_list, "Sobolev indices")
        ->delimiter(',');
  exp->add_option("-M,--samples", c.M_expect, "Monte Carlo samples (0 skips)");
  exp->add_option("--se-factor", c.expect_se_factor, "Agreement tolerance in standard errors");
  exp->add_option("--scaling-kmax", c.scaling_kmax, "Run the S(k)/|k|^2 table up to this |k| (0 skips)");
  exp->add_option("--threshold-s", c.threshold_s, "s grid for the streamline threshold scan (empty skips)")
        ->delimiter(',');
  exp->add_option("--threshold-kmax", c.threshold_kmax, "Outer cutoff for the threshold scan");

  auto* inv = app.add_subcommand("invariance", "Ensemble test of measure invariance");
  inv->add_option("--times", c.times, "Evaluation times")
        ->delimiter(',');
  inv->add_option("-M,--samples", c.M_inv, "Ensemble size");
  inv->add_flag("--bug-switch", c.bug_switch, "Negative control: skip the inner projection in B^N");
  inv->add_option("--z-max", c.z_max, "Largest admissible |z|");
  inv->add_option("--family-alpha", c.family_alpha, "KS family level");
  inv->add_option("--max-failure-rate", c.max_failure_rate, "Tolerated NonConvergence rate");
  add_integrator(inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadConfig;
  }

  Outputs o;
  o.dir = c.out;
  o.config_text = app.config_to_str(true, false);
  o.config_hash = hex64(fnv1a64(o.config_text));
  try {
    fs::create_directories(o.dir);
    if (*coef) return cmd_coefficients(c, o);
    if (*samp) return cmd_sample(c, o);
    if (*evo) return cmd_evolve(c, o);
    if (*exp) return cmd_expectation(c, o);
    if (*inv) return cmd_invariance(c, o);
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericFail;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericFail;
  }
  return kBadConfig;
}
