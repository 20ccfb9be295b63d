// Draws a field from the invariant Gaussian measure, runs the truncated flow
// for a unit of time and prints what is conserved and what is not.

#include <cstdio>

#include "msqg/msqg.hpp"

using namespace msqg;

int main() {
  ModelParams params;
  params.delta = 0.5;
  params.cutoff_N = 6;

  const GibbsSpec spec = GibbsSpec::for_model(params);
  const SpectralField psi = sample_field(spec, params.cutoff_N, {7, 0});

  IntegratorConfig config;
  config.dt = 0.01;
  const Trajectory traj = evolve(psi, 1.0, params, config, spec);

  std::printf("modes in box N=%d: %zu\n", params.cutoff_N, Box(params.cutoff_N).mode_count());
  std::printf("H^1 at t=0: %.15g\n", traj.drift.initial);
  std::printf("H^1 at t=1: %.15g\n", traj.drift.final);
  std::printf("max relative drift: %.3e\n", traj.drift.max_relative);
  std::printf("Duhamel residual (H^-2.5): %.3e\n", duhamel_residual(traj, params));

  const SpectralField& end = traj.states.back();
  std::printf("|psi_(1,0)|^2: %.6f -> %.6f\n", std::norm(psi[{1, 0}]), std::norm(end[{1, 0}]));
  std::printf("||psi||^2_{H^-2.5}: %.6f -> %.6f\n", sobolev_norm_sq(psi, -2.5), sobolev_norm_sq(end, -2.5));

  const SpectralField direct = truncated_nonlinearity(psi, params);
  const SpectralField fast = fast_nonlinearity(psi, params);
  std::printf("fast vs direct B^N: %.3e\n", max_abs_diff(direct, fast) / max_abs(direct));
  return 0;
}
