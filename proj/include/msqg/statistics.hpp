#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "msqg/summation.hpp"

namespace msqg {

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;        // standard error of the mean
};

inline SampleStats describe(std::span<const double> x) {
  SampleStats s;
  s.n = x.size();
  if (s.n == 0) return s;
  CompensatedSum sum;
  for (double v : x) sum.add(v);
  s.mean = sum.value() / static_cast<double>(s.n);
  if (s.n > 1) {
    CompensatedSum sq;
    for (double v : x) sq.add((v - s.mean) * (v - s.mean));
    s.variance = sq.value() / static_cast<double>(s.n - 1);
    s.se = std::sqrt(s.variance / static_cast<double>(s.n));
  }
  return s;
}

/// Streaming mean and variance (Welford), for when samples are not kept.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  SampleStats stats() const {
    SampleStats s;
    s.n = n_;
    s.mean = mean_;
    if (n_ > 1) {
      s.variance = m2_ / static_cast<double>(n_ - 1);
      s.se = std::sqrt(s.variance / static_cast<double>(n_));
    }
    return s;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

/// Two-sided normal tail probability P(|Z| > |z|).
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// z with P(|Z| > z) = p, by bisection.
inline double normal_two_sided_critical(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_two_sided_critical: p must be in (0,1)");
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_two_sided_p(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (effective-size correction of Stephens).
inline KsResult two_sample_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 30 || b.size() < 30) throw std::invalid_argument("two_sample_test: need at least 30 samples per side");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.statistic = d;
  const double ne = std::sqrt(n * m / (n + m));
  r.p_value = d == 0.0 ? 1.0 : kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

}  // namespace msqg
