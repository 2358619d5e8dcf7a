// Shared statistical test helpers (two-sample tests, GoF, moment checks).
#ifndef PHIBP_TESTS_TEST_UTIL_HPP
#define PHIBP_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace testutil {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

inline double variance(const std::vector<double>& v) {
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

// |empirical mean - expected| <= z * sd/sqrt(n)
inline bool mean_within(const std::vector<double>& v, double expected, double z = 3.0) {
  double sd = std::sqrt(variance(v) / double(v.size()));
  if (sd == 0.0) return v.empty() ? false : std::fabs(v.front() - expected) == 0.0;
  return std::fabs(mean(v) - expected) <= z * sd;
}

// Kolmogorov asymptotic survival function.
inline double ks_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k)
    sum += (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample KS test p-value (asymptotic; conservative under heavy ties).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::fabs(double(ia) / double(a.size()) -
                              double(ib) / double(b.size())));
  }
  double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return ks_sf(lambda);
}

// Welch two-sample test for equal means; normal-approximation p-value.
inline double welch_p(const std::vector<double>& a, const std::vector<double>& b) {
  double va = variance(a) / double(a.size());
  double vb = variance(b) / double(b.size());
  if (va + vb == 0.0) return mean(a) == mean(b) ? 1.0 : 0.0;
  double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  return std::erfc(std::fabs(t) / std::sqrt(2.0));
}

// Total variation distance between an empirical histogram over {0,..,K} and a
// reference pmf (tail mass lumped into the last slot).
inline double tv_distance(const std::vector<long>& samples,
                          const std::vector<double>& pmf) {
  std::vector<double> emp(pmf.size(), 0.0);
  for (long s : samples) {
    size_t idx = std::min<size_t>(size_t(std::max<long>(s, 0)), pmf.size() - 1);
    emp[idx] += 1.0 / double(samples.size());
  }
  double tv = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) tv += std::fabs(emp[i] - pmf[i]);
  return 0.5 * tv;
}

// Regularized upper incomplete gamma Q(a,x), a > 0 (for chi-square p-values).
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Chi-square goodness-of-fit p-value against a pmf over {min_k..}, pooling
// cells with expected count below 5 into the tail.
inline double chi2_gof_p(const std::vector<long>& samples,
                         const std::vector<double>& pmf) {
  double n = double(samples.size());
  std::vector<double> expected;
  std::vector<double> observed;
  std::vector<double> emp(pmf.size(), 0.0);
  for (long s : samples) {
    size_t idx = std::min<size_t>(size_t(std::max<long>(s, 0)), pmf.size() - 1);
    emp[idx] += 1.0;
  }
  double pool_e = 0.0, pool_o = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    double e = pmf[i] * n;
    if (e < 5.0) {
      pool_e += e;
      pool_o += emp[i];
      continue;
    }
    expected.push_back(e);
    observed.push_back(emp[i]);
  }
  if (pool_e > 0.0) {
    expected.push_back(pool_e);
    observed.push_back(pool_o);
  }
  if (expected.size() < 2) return 1.0;
  double chi2 = 0.0;
  for (size_t i = 0; i < expected.size(); ++i) {
    double d = observed[i] - expected[i];
    chi2 += d * d / expected[i];
  }
  return gamma_q(0.5 * double(expected.size() - 1), 0.5 * chi2);
}

}  // namespace testutil

#endif
