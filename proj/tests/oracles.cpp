#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

double integrate_positive_axis(const std::function<double(double)>& f, int levels) {
  // exp-sinh: s = exp((pi/2) sinh(u)), u over (-cut, cut); the wide cut keeps
  // slowly decaying s^{-alpha} endpoint singularities (alpha near 1) covered.
  const double cut = 6.8;
  double prev = 0.0, result = 0.0;
  for (int level = 6; level <= levels; ++level) {
    long n = 1L << level;
    double h = 2.0 * cut / double(n);
    double sum = 0.0;
    for (long i = 0; i <= n; ++i) {
      double u = -cut + h * double(i);
      double t = M_PI_2 * std::sinh(u);
      if (std::fabs(t) > 690.0) continue;  // e^t out of double range; weight ~ 0
      double s = std::exp(t);
      double w = s * M_PI_2 * std::cosh(u);
      double v = f(s) * w * ((i == 0 || i == n) ? 0.5 : 1.0);
      if (std::isfinite(v)) sum += v;
    }
    result = sum * h;
    if (level > 8 &&
        std::fabs(result - prev) <= 1e-13 * std::max(1.0, std::fabs(result)))
      break;
    prev = result;
  }
  return result;
}

double laplace_exponent_quad(const phibp::LevyParams& p, double t) {
  return integrate_positive_axis(
      [&](double s) { return -std::expm1(-t * s) * phibp::levy_density(p, s); });
}

double laplace_moment_quad(const phibp::LevyParams& p, int c, double t) {
  return integrate_positive_axis([&](double s) {
    return std::pow(s, double(c)) * std::exp(-t * s) * phibp::levy_density(p, s);
  });
}

namespace {

void composition_sum(double alpha, int n, int k, double prod, double& acc) {
  if (k == 1) {
    acc += prod * std::exp(std::lgamma(n - alpha) - std::lgamma(1.0 - alpha) -
                           std::lgamma(double(n) + 1.0));
    return;
  }
  for (int c = 1; c <= n - k + 1; ++c) {
    double w = std::exp(std::lgamma(c - alpha) - std::lgamma(1.0 - alpha) -
                        std::lgamma(double(c) + 1.0));
    composition_sum(alpha, n - c, k - 1, prod * w, acc);
  }
}

}  // namespace

double stirling_bruteforce(double alpha, int n, int k) {
  if (k < 1 || k > n) throw std::domain_error("stirling_bruteforce: bad (n,k)");
  double acc = 0.0;
  composition_sum(alpha, n, k, 1.0, acc);
  return acc * std::exp(std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0));
}

double mtp_pmf_quad(const phibp::LevyParams& p, int c, double gamma_total) {
  double psi = laplace_exponent_quad(p, gamma_total);
  double mom = laplace_moment_quad(p, c, gamma_total);
  return std::pow(gamma_total, double(c)) * mom /
         (std::exp(std::lgamma(double(c) + 1.0)) * psi);
}

double mtp_convolution_quad(const phibp::LevyParams& p, int k, int n,
                            double gamma_total) {
  if (k < 0 || n < 0) throw std::domain_error("mtp_convolution_quad: bad (k,n)");
  if (k == 0) return n == 0 ? 1.0 : 0.0;
  std::vector<double> pmf(size_t(n + 1), 0.0);
  for (int c = 1; c <= n; ++c) pmf[size_t(c)] = mtp_pmf_quad(p, c, gamma_total);
  std::vector<double> conv(size_t(n + 1), 0.0);
  conv[0] = 1.0;  // k = 0
  for (int round = 0; round < k; ++round) {
    std::vector<double> next(size_t(n + 1), 0.0);
    for (int a = 0; a <= n; ++a) {
      if (conv[size_t(a)] == 0.0) continue;
      for (int c = 1; a + c <= n; ++c)
        next[size_t(a + c)] += conv[size_t(a)] * pmf[size_t(c)];
    }
    conv.swap(next);
  }
  return conv[size_t(n)];
}

}  // namespace oracles
