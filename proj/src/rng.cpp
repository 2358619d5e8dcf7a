#include "phibp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phibp {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (stream * 0xD2B74407B1CE6E93ULL + 0x8BB84B93962EACC9ULL);
  std::seed_seq seq{std::uint32_t(s), std::uint32_t(s >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32), std::uint32_t(seed),
                    std::uint32_t(seed >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), eng_(make_engine(seed, stream)) {}

Rng Rng::derive(std::uint64_t tag) const {
  std::uint64_t x = stream_ ^ (tag + 0x9E3779B97F4A7C15ULL);
  std::uint64_t child = splitmix64(x);
  return Rng(seed_, child);
}

std::uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform() {
  // 53-bit mantissa in (0,1); shift into the open interval.
  double u = double(eng_() >> 11) * 0x1.0p-53;
  return u == 0.0 ? 0x1.0p-53 : u;
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() {
  while (true) {
    double u = 2.0 * uniform() - 1.0;
    double v = 2.0 * uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be > 0");
  if (shape < 1.0)
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  // Marsaglia-Tsang squeeze
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("log_gamma_draw: shape must be > 0");
  if (shape >= 0.1) return std::log(gamma(shape));
  return std::log(gamma(shape + 1.0)) + std::log(uniform()) / shape;
}

double Rng::beta(double a, double b) {
  double x = gamma(a), y = gamma(b);
  return x / (x + y);
}

long Rng::poisson_inversion(double mu) {
  double p = std::exp(-mu);
  double cum = p;
  double u = uniform();
  long k = 0;
  while (u > cum) {
    ++k;
    p *= mu / double(k);
    cum += p;
    if (k > 2000) break;  // cum has saturated numerically
  }
  return k;
}

long Rng::poisson_ptrs(double mu) {
  // Hormann's transformed rejection with squeeze, exact for mu >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mu = std::log(mu);
  while (true) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    long k = long(std::floor((2.0 * a / us + b) * u + mu + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * log_mu - mu - std::lgamma(double(k) + 1.0))
      return k;
  }
}

long Rng::poisson(double mu) {
  if (mu < 0.0) throw std::domain_error("poisson: mu must be >= 0");
  if (mu == 0.0) return 0;
  if (mu < 10.0) return poisson_inversion(mu);
  return poisson_ptrs(mu);
}

long Rng::zt_poisson(double s) {
  if (!(s > 0.0)) throw std::domain_error("zt_poisson: s must be > 0");
  if (s > 10.0) {
    while (true) {
      long k = poisson(s);
      if (k >= 1) return k;
    }
  }
  // inversion: P(1) = s / (e^s - 1), P(k+1)/P(k) = s/(k+1)
  double p = s / std::expm1(s);
  double cum = p;
  double u = uniform();
  long k = 1;
  while (u > cum && k < 2000) {
    ++k;
    p *= s / double(k);
    cum += p;
  }
  return k;
}

long Rng::binomial(long n, double p) {
  if (n < 0) throw std::domain_error("binomial: n must be >= 0");
  if (p < 0.0 || p > 1.0) throw std::domain_error("binomial: p must lie in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  long count = 0;
  // Order-statistic split keeps the Bernoulli stage at most 64 wide.
  while (n > 64) {
    long m = n / 2;
    double v = beta(double(m), double(n - m + 1));  // m-th of n uniforms
    if (v <= p) {
      count += m;
      p = (p - v) / (1.0 - v);
      n = n - m;
    } else {
      p = p / v;
      n = m - 1;
    }
    if (p <= 0.0) return count;
    if (p >= 1.0) return count + n;
  }
  for (long i = 0; i < n; ++i)
    if (uniform() < p) ++count;
  return count;
}

std::vector<long> Rng::multinomial(long n, const std::vector<double>& weights) {
  if (n < 0) throw std::domain_error("multinomial: n must be >= 0");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::domain_error("multinomial: negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::domain_error("multinomial: weights must sum to 1");
  std::vector<long> out(weights.size(), 0);
  long remaining = n;
  double wrem = 1.0;
  for (size_t i = 0; i + 1 < weights.size() && remaining > 0; ++i) {
    double cond = weights[i] / wrem;
    long c = binomial(remaining, std::clamp(cond, 0.0, 1.0));
    out[i] = c;
    remaining -= c;
    wrem -= weights[i];
    if (wrem <= 0.0) break;
  }
  if (!out.empty()) out.back() += remaining;
  return out;
}

std::vector<double> Rng::dirichlet(const std::vector<double>& conc) {
  if (conc.empty()) throw std::domain_error("dirichlet: empty concentration vector");
  std::vector<double> lg(conc.size());
  double lse = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < conc.size(); ++i) {
    if (!(conc[i] > 0.0)) throw std::domain_error("dirichlet: nonpositive concentration");
    lg[i] = log_gamma_draw(conc[i]);
    lse = std::max(lse, lg[i]);
  }
  double sum = 0.0;
  for (double v : lg) sum += std::exp(v - lse);
  double log_total = lse + std::log(sum);
  std::vector<double> out(conc.size());
  for (size_t i = 0; i < conc.size(); ++i) out[i] = std::exp(lg[i] - log_total);
  return out;
}

long Rng::mtp(const LevyParams& p, double gamma_total) {
  p.validate();
  if (!(gamma_total > 0.0)) throw std::domain_error("mtp: gamma_total must be > 0");
  const double succ = gamma_total / (gamma_total + p.zeta);
  // P(1) = gamma psi^{(1)}(gamma) / psi(gamma)
  double prob = gamma_total * laplace_moment(p, 1, gamma_total) /
                laplace_exponent(p, gamma_total);
  double cum = prob;
  double u = uniform();
  long c = 1;
  while (u > cum && c < 100000000) {
    // P(c+1)/P(c) = succ * (c - alpha) / (c + 1)
    prob *= succ * (double(c) - p.alpha) / double(c + 1);
    cum += prob;
    ++c;
  }
  return c;
}

double Rng::stable(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("stable: alpha in (0,1)");
  double phi = M_PI * uniform();
  double e = exponential();
  double r = (1.0 - alpha) / alpha;
  // Kanter's representation of the Zolotarev integral.
  return std::sin(alpha * phi) * std::pow(std::sin((1.0 - alpha) * phi), r) /
         (std::pow(std::sin(phi), 1.0 / alpha) * std::pow(e, r));
}

double Rng::tilted_stable(double alpha, double y, double tilt) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("tilted_stable: alpha in (0,1)");
  if (y < 0.0 || tilt < 0.0)
    throw std::domain_error("tilted_stable: y and tilt must be >= 0");
  if (y == 0.0) return 0.0;
  if (tilt == 0.0) return std::pow(y, 1.0 / alpha) * stable(alpha);
  // T = sum of m pieces, each an exponentially tilted stable with scale y/m;
  // m ~ y * tilt^alpha keeps per-piece acceptance above 1/e.
  double load = y * std::pow(tilt, alpha);
  long m = std::max<long>(1, long(std::ceil(load)));
  double piece_scale = std::pow(y / double(m), 1.0 / alpha);
  double total = 0.0;
  for (long i = 0; i < m; ++i) {
    while (true) {
      double s = piece_scale * stable(alpha);
      if (uniform() <= std::exp(-tilt * s)) {
        total += s;
        break;
      }
    }
  }
  return total;
}

}  // namespace phibp
