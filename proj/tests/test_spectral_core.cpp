#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "msqg/coefficients.hpp"
#include "msqg/fast_nonlinearity.hpp"
#include "msqg/nonlinearity.hpp"
#include "test_support.hpp"

using namespace msqg;
using testing_support::brute_force_B;
using testing_support::oracle_alpha;
using testing_support::random_hermitian;
using testing_support::to_sparse;

namespace {

ModelParams make(double delta, int N = 4, Formulation f = Formulation::Regularized) {
  ModelParams p;
  p.delta = delta;
  p.cutoff_N = N;
  p.formulation = f;
  return p;
}

double max_diff(const testing_support::SparseField& oracle, const SpectralField& f) {
  double worst = 0.0;
  for (const auto& [k, v] : oracle) worst = std::max(worst, std::abs(v - f[{k.first, k.second}]));
  const int e = f.extent();
  for (int a = -e; a <= e; ++a)
    for (int b = -e; b <= e; ++b)
      if (!oracle.count({a, b})) worst = std::max(worst, std::abs(f[{a, b}]));
  return worst;
}

}  // namespace

TEST(Lattice, BoxIndexingRoundTrips) {
  const Box box(3);
  EXPECT_EQ(box.mode_count(), 48u);
  for (std::size_t i = 0; i < box.slots(); ++i) EXPECT_EQ(box.index(box.mode(i)), i);
  EXPECT_EQ(box.representatives().size(), 24u);
  for (auto k : box.representatives()) EXPECT_FALSE((-k).is_representative());
}

TEST(Alpha, ParallelAndExcludedTermsVanish) {
  EXPECT_EQ(alpha({2, 0}, {1, 0}, make(0.5)), 0.0);
  EXPECT_EQ(alpha({1, 0}, {1, 0}, make(1.0)), 0.0);
  EXPECT_EQ(alpha({1, 0}, {0, 0}, make(1.0)), 0.0);
  EXPECT_EQ(alpha({3, 3}, {3, 3}, make(0.25)), 0.0);
  EXPECT_THROW(alpha({0, 0}, {1, 2}, make(0.5)), std::invalid_argument);
}

TEST(Alpha, HandEvaluatedExample) {
  const double v = alpha({1, 0}, {0, 1}, make(1.0));
  EXPECT_NEAR(v, -1.0 / (2.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_EQ(v, alpha({1, 0}, {1, -1}, make(1.0)));
}

TEST(Alpha, MatchesClosedFormOracle) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> d(-12, 12);
  for (double delta : {0.1, 0.5, 1.0})
    for (int i = 0; i < 2000; ++i) {
      const int k1 = d(rng), k2 = d(rng), h1 = d(rng), h2 = d(rng);
      if (k1 == 0 && k2 == 0) continue;
      const double want = oracle_alpha(k1, k2, h1, h2, delta);
      EXPECT_NEAR(alpha({k1, k2}, {h1, h2}, make(delta)), want, 1e-13 * (1.0 + std::abs(want)));
      const double want_s = oracle_alpha(k1, k2, h1, h2, delta, true);
      EXPECT_NEAR(alpha({k1, k2}, {h1, h2}, make(delta, 4, Formulation::Streamline)), want_s,
                  1e-12 * (1.0 + std::abs(want_s)));
    }
}

TEST(Alpha, EulerSpecialization) {
  // delta = 1: -1/2 (h^perp.k/|k|) (|h|^2 - |k-h|^2) / (|h||k-h|)
  for (int k1 = -4; k1 <= 4; ++k1)
    for (int k2 = -4; k2 <= 4; ++k2)
      for (int h1 = -5; h1 <= 5; ++h1)
        for (int h2 = -5; h2 <= 5; ++h2) {
          if ((k1 == 0 && k2 == 0) || (h1 == 0 && h2 == 0) || (h1 == k1 && h2 == k2)) continue;
          const double hn2 = h1 * h1 + h2 * h2, qn2 = (k1 - h1) * (k1 - h1) + (k2 - h2) * (k2 - h2);
          const double want = -0.5 * ((-h2 * k1 + h1 * k2) / std::hypot(k1, k2)) * (hn2 - qn2) / std::sqrt(hn2 * qn2);
          EXPECT_NEAR(alpha({k1, k2}, {h1, h2}, make(1.0)), want, 1e-13 * (1.0 + std::abs(want)));
        }
}

TEST(Alpha, SymmetriesHoldExactly) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(-32, 32);
  for (double delta : {0.25, 0.5, 1.0})
    for (int i = 0; i < 5000; ++i) {
      const LatticeMode k{d(rng), d(rng)}, h{d(rng), d(rng)};
      if (k.is_zero()) continue;
      const auto p = make(delta);
      EXPECT_EQ(alpha(k, h, p), alpha(k, k - h, p));
      EXPECT_EQ(alpha(k, h, p), alpha(-k, -h, p));
      const auto s = make(delta, 4, Formulation::Streamline);
      EXPECT_EQ(alpha(k, h, s), alpha(k, k - h, s));
    }
}

TEST(Alpha, ContinuousInDelta) {
  const LatticeMode k{3, -1}, h{-2, 5};
  const double a0 = alpha(k, h, make(0.5));
  double prev = std::abs(alpha(k, h, make(0.6)) - a0);
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double d = std::abs(alpha(k, h, make(0.5 + eps)) - a0);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Nonlinearity, ZeroFieldGivesZero) {
  EXPECT_TRUE(nonlinearity(SpectralField(3, true), make(0.5)).is_zero());
}

TEST(Nonlinearity, SingleModePairIsStationary) {
  const auto psi = SpectralField::from_modes({{{2, 1}, {0.3, -0.7}}}, true);
  const auto B = nonlinearity(psi, make(0.5));
  EXPECT_TRUE(B.is_zero());
  EXPECT_EQ((B[{4, 2}]), Complex{});
}

TEST(Nonlinearity, MatchesBruteForceConvolution) {
  for (double delta : {0.5, 1.0})
    for (unsigned seed : {1u, 2u, 3u}) {
      const auto psi = random_hermitian(4, seed);
      const auto oracle = brute_force_B(to_sparse(psi), delta);
      const auto B = nonlinearity(psi, make(delta));
      EXPECT_LT(max_diff(oracle, B), 1e-12) << "delta " << delta << " seed " << seed;
    }
}

TEST(Nonlinearity, StreamlineMatchesBruteForceConvolution) {
  const auto psi = random_hermitian(3, 9, 2.0);
  const auto oracle = brute_force_B(to_sparse(psi), 0.5, true);
  EXPECT_LT(max_diff(oracle, nonlinearity(psi, make(0.5, 3, Formulation::Streamline))), 1e-12);
}

TEST(Nonlinearity, PreservesHermitianSymmetryAndScalesQuadratically) {
  const auto psi = random_hermitian(5, 17);
  const auto p = make(0.3, 5);
  const auto B = truncated_nonlinearity(psi, p);
  EXPECT_EQ(B.hermitian_defect(), 0.0);
  SpectralField psi3 = psi;
  psi3 *= 3.0;
  SpectralField B9 = B;
  B9 *= 9.0;
  EXPECT_LT(max_abs_diff(truncated_nonlinearity(psi3, p), B9), 1e-12 * max_abs(B9));
}

TEST(Nonlinearity, RejectsDeltaZero) {
  EXPECT_THROW(nonlinearity(random_hermitian(2, 1), make(0.0)), std::invalid_argument);
  EXPECT_THROW(truncated_nonlinearity(random_hermitian(2, 1), make(0.0)), std::invalid_argument);
}

TEST(Truncated, SupportOutsideBoxGivesZero) {
  const auto psi = SpectralField::from_modes({{{5, 0}, {1.0, 0.0}}, {{1, 6}, {0.0, 2.0}}}, true);
  EXPECT_TRUE(truncated_nonlinearity(psi, make(0.5, 4)).is_zero());
}

TEST(Truncated, InactiveCutoffEqualsFullNonlinearity) {
  const auto psi = random_hermitian(2, 4);
  const auto full = nonlinearity(psi, make(0.5));
  const auto trunc = truncated_nonlinearity(psi, make(0.5, 4));
  EXPECT_LT(max_abs_diff(full, trunc), 1e-15);
}

TEST(Truncated, EqualsProjectionComposition) {
  const auto psi = random_hermitian(6, 21);
  const auto p = make(0.5, 3);
  const auto composed = project(nonlinearity(project(psi, 3), p), 3);
  EXPECT_LT(max_abs_diff(truncated_nonlinearity(psi, p), composed), 1e-15);
}

TEST(Truncated, ConservedFormIsOrthogonalToVectorField) {
  // Re sum |k|^{2c} conj(psi_k) B^N_k = 0: the H^c norm is a first integral.
  for (auto f : {Formulation::Regularized, Formulation::Streamline})
    for (unsigned seed = 0; seed < 5; ++seed) {
      const auto p = make(0.4, 5, f);
      const auto psi = random_hermitian(5, 100 + seed);
      const auto B = truncated_nonlinearity(psi, p);
      const double c = p.conserved_index();
      double acc = 0.0, scale = 0.0;
      for (auto k : Box(5).modes()) {
        const double w = std::pow(static_cast<double>(k.norm_sq()), c);
        acc += w * (std::conj(psi[k]) * B[k]).real();
        scale += w * std::abs(psi[k]) * std::abs(B[k]);
      }
      EXPECT_LT(std::abs(acc), 1e-13 * scale);
    }
}

TEST(Projection, DecompositionIsExact) {
  const auto psi = random_hermitian(6, 8);
  EXPECT_TRUE(project(psi, 0).is_zero());
  SpectralField sum = project(psi, 4);
  sum += project_complement(psi, 4);
  EXPECT_EQ(max_abs_diff(sum, psi), 0.0);
  const auto single = SpectralField::from_modes({{{5, 0}, {1.0, 0.0}}}, true);
  EXPECT_EQ((project_complement(single, 4)[{5, 0}]), Complex(1.0, 0.0));
  EXPECT_TRUE(project(single, 4).is_zero());
}

TEST(Sobolev, Examples) {
  EXPECT_EQ(sobolev_norm_sq(SpectralField(3, true), 1.0), 0.0);
  const auto f = SpectralField::from_modes({{{1, 0}, {1.0, 0.0}}}, true);
  EXPECT_EQ(sobolev_norm_sq(f, 0.0), 2.0);
  EXPECT_EQ(sobolev_norm_sq(f, 1.0), 2.0);
  const auto g = SpectralField::from_modes({{{1, 1}, {0.0, 1.0}}}, true);
  EXPECT_NEAR(sobolev_norm_sq(g, -1.5), 2.0 * std::pow(2.0, -1.5), 1e-15);
}

TEST(FastPath, MatchesDirectSum) {
  for (auto f : {Formulation::Regularized, Formulation::Streamline})
    for (double delta : {0.25, 1.0}) {
      const auto p = make(delta, 8, f);
      FastNonlinearity op(p);
      for (unsigned seed = 0; seed < 4; ++seed) {
        const auto psi = random_hermitian(8, 40 + seed);
        const auto direct = truncated_nonlinearity(psi, p);
        const auto fast = op(psi);
        EXPECT_LT(max_abs_diff(direct, fast), 1e-10 * max_abs(direct));
        EXPECT_EQ(fast.hermitian_defect(), 0.0);
      }
    }
}

TEST(FastPath, MinimalExactGridSuffices) {
  const auto p = make(0.5, 6);
  const auto psi = random_hermitian(6, 77);
  const auto direct = truncated_nonlinearity(psi, p);
  FastNonlinearity op(p, min_exact_grid(6));
  EXPECT_LT(max_abs_diff(direct, op(psi)), 1e-10 * max_abs(direct));
  EXPECT_THROW(FastNonlinearity(p, min_exact_grid(6) - 1), std::invalid_argument);
}
