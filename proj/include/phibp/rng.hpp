#ifndef PHIBP_RNG_HPP
#define PHIBP_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "phibp/levy.hpp"

namespace phibp {

// Seeded random stream.  Identical (seed, stream) pairs reproduce identical
// draw sequences across runs; derive() yields decorrelated child streams for
// chains, replicates, and per-species workers.  Every sampler below is exact
// (no discretization or approximate inversion) and hand-rolled so sequences do
// not depend on the standard library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child stream keyed by tag; independent of draws made so far.
  Rng derive(std::uint64_t tag) const;

  std::uint64_t next_u64();
  double uniform();      // (0,1), 53-bit resolution, never exactly 0 or 1
  double exponential();  // rate 1
  double normal();       // standard normal (polar method)

  // Gamma(shape, 1); shape > 0 (shape < 1 via the power boost).
  double gamma(double shape);
  double gamma_rate(double shape, double rate) { return gamma(shape) / rate; }
  // ln Gamma(shape,1) draw; stable for very small shapes.
  double log_gamma_draw(double shape);
  double beta(double a, double b);

  long poisson(double mu);
  // Zero-truncated Poisson(s), s > 0; always returns >= 1.
  long zt_poisson(double s);
  long binomial(long n, double p);

  // Multinomial(n; weights), weights nonnegative summing to 1 within 1e-12.
  std::vector<long> multinomial(long n, const std::vector<double>& weights);

  // Dirichlet(concentrations), all > 0; components positive, summing to 1.
  std::vector<double> dirichlet(const std::vector<double>& conc);

  // C ~ MtP(tau, gamma_total): pmf proportional to gamma^c psi^{(c)}(gamma)/c!.
  // Gamma case is the logarithmic-series law with p = gamma/(gamma+zeta).
  long mtp(const LevyParams& p, double gamma_total);

  // Positive alpha-stable with E exp(-sS) = exp(-s^alpha) (Kanter's method).
  double stable(double alpha);

  // Exponentially tilted stable T with E exp(-sT) = exp(-y((tilt+s)^alpha - tilt^alpha)).
  // tilt = 1 gives the "simple" generalized-gamma variable with
  // E exp(-sT) = exp(-y((1+s)^alpha - 1)); tilt = 0 is the untilted stable, scale y.
  // Sampled exactly by an m-fold decomposition with per-piece rejection, m chosen
  // so each piece accepts with probability >= 1/e regardless of the tilt.
  double tilted_stable(double alpha, double y, double tilt);

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 eng_;
  long poisson_inversion(double mu);
  long poisson_ptrs(double mu);
};

}  // namespace phibp

#endif
