#include "phibp/levy.hpp"

#include <cmath>
#include <limits>

namespace phibp {

double levy_density(const LevyParams& p, double s) {
  p.validate();
  if (!(s > 0.0)) throw std::domain_error("levy_density: s must be > 0");
  if (p.is_gamma()) return p.theta * std::exp(-p.zeta * s) / s;
  return p.theta / std::tgamma(1.0 - p.alpha) *
         std::pow(s, -p.alpha - 1.0) * std::exp(-p.zeta * s);
}

double laplace_exponent(const LevyParams& p, double t) {
  p.validate();
  if (t < 0.0) throw std::domain_error("laplace_exponent: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (p.is_gamma()) return p.theta * std::log1p(t / p.zeta);
  return p.theta / p.alpha *
         (std::pow(p.zeta + t, p.alpha) - std::pow(p.zeta, p.alpha));
}

double log_laplace_moment(const LevyParams& p, int c, double t) {
  p.validate();
  if (c < 1) throw std::domain_error("laplace_moment: c must be >= 1");
  if (t < 0.0) throw std::domain_error("laplace_moment: t must be >= 0");
  if (p.is_gamma())
    return std::log(p.theta) + std::lgamma(double(c)) - c * std::log(t + p.zeta);
  return std::log(p.theta) + std::lgamma(c - p.alpha) - std::lgamma(1.0 - p.alpha) +
         (p.alpha - c) * std::log(t + p.zeta);
}

double laplace_moment(const LevyParams& p, int c, double t) {
  return std::exp(log_laplace_moment(p, c, t));
}

double mtp_log_pmf(const LevyParams& p, int c, double gamma_total) {
  if (!(gamma_total > 0.0))
    throw std::domain_error("mtp_log_pmf: gamma_total must be > 0");
  if (c < 1) return -std::numeric_limits<double>::infinity();
  return c * std::log(gamma_total) + log_laplace_moment(p, c, gamma_total) -
         std::lgamma(double(c) + 1.0) - std::log(laplace_exponent(p, gamma_total));
}

double mtp_mean(const LevyParams& p, double gamma_total) {
  if (!(gamma_total > 0.0))
    throw std::domain_error("mtp_mean: gamma_total must be > 0");
  // int s tau(s) ds = theta * zeta^{alpha-1} (gamma case included at alpha=0).
  const double first_moment = p.theta * std::pow(p.zeta, p.alpha - 1.0);
  return gamma_total * first_moment / laplace_exponent(p, gamma_total);
}

namespace {

// Regularized lower incomplete gamma P(a,x) by series, a > 0, x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Unnormalized Gamma(a,x) by Lentz continued fraction; valid for x >= 1, any a <= x+1.
double upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x)) * h;
}

// E1(x) by series, 0 < x < 1.5.
double exp_integral_e1_series(double x) {
  const double euler = 0.57721566490153286060651209008240243;
  double sum = -euler - std::log(x);
  double term = 1.0;
  for (int k = 1; k <= 200; ++k) {
    term *= -x / k;
    double add = -term / k;
    sum += add;
    if (std::fabs(add) < std::fabs(sum) * 1e-16 + 1e-300) break;
  }
  return sum;
}

}  // namespace

double upper_incomplete_gamma(double a, double x) {
  if (!(x > 0.0)) throw std::domain_error("upper_incomplete_gamma: x must be > 0");
  if (!(a > -1.0 && a <= 1.0))
    throw std::domain_error("upper_incomplete_gamma: a must lie in (-1, 1]");
  if (x >= 1.5) return upper_gamma_cf(a, x);
  if (a == 0.0) return exp_integral_e1_series(x);
  if (a > 0.0) return std::tgamma(a) * (1.0 - gamma_p_series(a, x));
  // a in (-1,0): recur from a+1 in (0,1); no cancellation trouble at small x.
  double g_up = std::tgamma(a + 1.0) * (1.0 - gamma_p_series(a + 1.0, x));
  return (g_up - std::pow(x, a) * std::exp(-x)) / a;
}

double levy_tail_mass(const LevyParams& p, double x) {
  p.validate();
  if (!(x > 0.0)) throw std::domain_error("levy_tail_mass: x must be > 0");
  // int_x^inf s^{-alpha-1} e^{-zeta s} ds = zeta^alpha Gamma(-alpha, zeta x)
  if (p.is_gamma()) return p.theta * upper_incomplete_gamma(0.0, p.zeta * x);
  return p.theta / std::tgamma(1.0 - p.alpha) * std::pow(p.zeta, p.alpha) *
         upper_incomplete_gamma(-p.alpha, p.zeta * x);
}

}  // namespace phibp
