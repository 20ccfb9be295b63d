#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "msqg/expectation.hpp"
#include "msqg/flow.hpp"
#include "msqg/invariance.hpp"
#include "msqg/snapshot.hpp"

namespace msqg {

using json = nlohmann::json;

/// 17 significant digits: enough for an exact double round trip.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// 64-bit FNV-1a, used to tag outputs with the config that produced them.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  return os;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

inline json to_json(const ModelParams& p) {
  return {{"delta", p.delta},
          {"formulation", std::string(to_string(p.formulation))},
          {"cutoff_N", p.cutoff_N},
          {"appendix_literal", p.appendix_literal}};
}

inline json to_json(const IntegratorConfig& c) {
  return {{"method", std::string(to_string(c.method))},
          {"dt", c.dt},
          {"fixed_point_tol", c.fixed_point_tol},
          {"max_fixed_point_iters", c.max_fixed_point_iters}};
}

inline json to_json(const GibbsSpec& s) {
  return {{"exponent", s.exponent},
          {"scale", s.scale},
          {"formulation", std::string(to_string(s.formulation))},
          {"law", std::string(to_string(s.law))}};
}

inline json to_json(const SeededStream& s) { return {{"master_seed", s.master_seed}, {"stream_id", s.stream_id}}; }

inline json to_json(const DriftReport& d) {
  return {{"initial", d.initial},
          {"final", d.final},
          {"max_relative", d.max_relative},
          {"log_density_max_relative", d.log_density_max_relative},
          {"complement_max_change", d.complement_max_change},
          {"hermitian_max_defect", d.hermitian_max_defect}};
}

inline json to_json(const EnsembleReport& r) {
  json j;
  j["config"] = {{"N", r.N},
                 {"delta", r.delta},
                 {"times", r.times},
                 {"members", r.members},
                 {"variant", r.variant == FlowVariant::Truncated ? "truncated" : "skip-inner-projection"},
                 {"integrator", to_json(r.config)},
                 {"gibbs", to_json(r.spec)},
                 {"thresholds",
                  {{"z_max", r.thresholds.z_max},
                   {"family_alpha", r.thresholds.family_alpha},
                   {"max_failure_rate", r.thresholds.max_failure_rate}}}};
  j["seeds"] = to_json(r.stream);
  json obs = json::array();
  for (const auto& o : r.results)
    obs.push_back({{"name", o.name},
                   {"time", o.time},
                   {"mean", o.mean},
                   {"variance", o.variance},
                   {"se", o.se},
                   {"mean0", o.mean0},
                   {"diff_mean", o.diff_mean},
                   {"diff_se", o.diff_se},
                   {"z", o.z},
                   {"p_adjusted", o.p_adjusted},
                   {"ks_statistic", o.ks_statistic},
                   {"ks_p", o.ks_p},
                   {"z_pass", o.z_pass},
                   {"ks_pass", o.ks_pass}});
  j["observables"] = std::move(obs);
  j["decisions"] = {{"tests", r.tests},
                    {"ks_threshold", r.ks_threshold},
                    {"max_abs_z", r.max_abs_z},
                    {"min_ks_p", r.min_ks_p},
                    {"members_failed", r.members_failed},
                    {"max_conserved_drift", r.max_conserved_drift},
                    {"valid", r.valid},
                    {"pass", r.pass}};
  return j;
}

inline void write_csv(std::ostream& os, const EnsembleReport& r) {
  os << "observable,time,mean,variance,se,mean0,diff_mean,diff_se,z,p_adjusted,ks_statistic,ks_p,pass\n";
  for (const auto& o : r.results)
    os << o.name << ',' << fmt17(o.time) << ',' << fmt17(o.mean) << ',' << fmt17(o.variance) << ',' << fmt17(o.se)
       << ',' << fmt17(o.mean0) << ',' << fmt17(o.diff_mean) << ',' << fmt17(o.diff_se) << ',' << fmt17(o.z) << ','
       << fmt17(o.p_adjusted) << ',' << fmt17(o.ks_statistic) << ',' << fmt17(o.ks_p) << ','
       << (o.z_pass && o.ks_pass ? 1 : 0) << '\n';
}

inline json to_json(const TrajectoryNormReport& r) {
  auto one = [](const NormBoundResult& b) {
    return json{{"lhs", b.lhs}, {"se", b.se}, {"rhs", b.rhs}, {"z", b.z}, {"pass", b.pass}};
  };
  return {{"T", r.T}, {"sigma", r.sigma}, {"members", r.members}, {"state", one(r.state)}, {"derivative", one(r.derivative)}};
}

// ---------------------------------------------------------------------------

inline void write_sum_csv_header(std::ostream& os) { os << "k1,k2,R,S,S1,S2,S3,verdict\n"; }

inline void write_sum_csv_rows(std::ostream& os, const SumReport& r) {
  for (std::size_t i = 0; i < r.radii.size(); ++i)
    os << r.k.k1 << ',' << r.k.k2 << ',' << r.radii[i] << ',' << fmt17(r.partial_sums[i]) << ',' << fmt17(r.s1[i])
       << ',' << fmt17(r.s2[i]) << ',' << fmt17(r.s3[i]) << ',' << to_string(r.verdict) << '\n';
}

inline void write_expectation_csv_header(std::ostream& os) { os << "N,s,delta,analytic,mc,se\n"; }

inline void write_expectation_csv_row(std::ostream& os, int N, double s, double delta, double analytic,
                                      const MonteCarloEstimate& mc) {
  os << N << ',' << fmt17(s) << ',' << fmt17(delta) << ',' << fmt17(analytic) << ',' << fmt17(mc.estimate) << ','
     << fmt17(mc.standard_error) << '\n';
}

inline void write_csv(std::ostream& os, const ScalingReport& r) {
  os << "k,R,S,ratio\n";
  for (const auto& row : r.rows)
    os << row.k << ',' << row.radius << ',' << fmt17(row.sum) << ',' << fmt17(row.ratio) << '\n';
}

inline void write_csv(std::ostream& os, const ThresholdScan& scan) {
  os << "variant,s,exponent,verdict\n";
  for (const auto* v : {&scan.rederived, &scan.appendix_literal})
    for (const auto& row : v->rows)
      os << v->name << ',' << fmt17(row.s) << ',' << fmt17(row.exponent) << ',' << to_string(row.verdict) << '\n';
}

inline json to_json(const ThresholdScan& scan) {
  auto variant = [](const ThresholdVariant& v) {
    json j{{"name", v.name}, {"predicted_threshold", v.predicted_threshold}};
    j["empirical_threshold"] = v.empirical_threshold ? json(*v.empirical_threshold) : json(nullptr);
    return j;
  };
  return {{"delta", scan.delta},
          {"k_max", scan.k_max},
          {"claimed_threshold", scan.claimed_threshold},
          {"rederived", variant(scan.rederived)},
          {"appendix_literal", variant(scan.appendix_literal)}};
}

// ---------------------------------------------------------------------------

/// Writes one snapshot per stored time (state_00000.bin, ...) and a
/// trajectory.json sidecar with times, metadata and the drift report.
inline void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const json& extra = {}) {
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "state_%05zu.bin", i);
    save_snapshot((dir / name).string(), traj.states[i], traj.params.cutoff_N, traj.params);
    files.push_back(name);
  }
  json j{{"params", to_json(traj.params)},
         {"integrator", to_json(traj.config)},
         {"times", traj.times},
         {"snapshots", files},
         {"drift", to_json(traj.drift)}};
  if (traj.gibbs) j["gibbs"] = to_json(*traj.gibbs);
  if (traj.seed) j["seed"] = to_json(*traj.seed);
  if (!extra.is_null()) j["extra"] = extra;
  write_json(dir / "trajectory.json", j);
}

}  // namespace msqg
