#ifndef PHIBP_LEVY_HPP
#define PHIBP_LEVY_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace phibp {

// Parameters of a generalized-gamma Levy density
//   tau(s) = theta / Gamma(1-alpha) * s^{-alpha-1} * exp(-zeta*s).
// alpha == 0 selects the gamma-process branch tau(s) = theta * s^{-1} e^{-zeta*s}
// exactly; every routine below switches on alpha == 0 rather than taking limits.
struct LevyParams {
  double alpha = 0.0;  // in [0,1)
  double theta = 1.0;  // > 0
  double zeta = 1.0;   // > 0

  void validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0))
      throw std::domain_error("LevyParams: alpha must lie in [0,1)");
    if (!(theta > 0.0)) throw std::domain_error("LevyParams: theta must be > 0");
    if (!(zeta > 0.0)) throw std::domain_error("LevyParams: zeta must be > 0");
  }
  bool is_gamma() const { return alpha == 0.0; }
};

// Levy density tau(s) itself; used by quadrature oracles and the unseen-species
// atom generator.
double levy_density(const LevyParams& p, double s);

// Laplace exponent psi(t) = int_0^inf (1 - e^{-t s}) tau(s) ds.
//   alpha > 0:  (theta/alpha) ((zeta+t)^alpha - zeta^alpha)
//   alpha == 0: theta * log(1 + t/zeta)
double laplace_exponent(const LevyParams& p, double t);

// c-th moment of the exponentially tilted density,
//   psi^{(c)}(t) = int_0^inf s^c e^{-t s} tau(s) ds, c >= 1.
// Returned on the natural scale; log_laplace_moment is the log-space workhorse.
double laplace_moment(const LevyParams& p, int c, double t);
double log_laplace_moment(const LevyParams& p, int c, double t);

// log pmf of C ~ MtP(tau, gamma_total): P(C=c) = gamma^c psi^{(c)}(gamma) / (c! psi(gamma)).
double mtp_log_pmf(const LevyParams& p, int c, double gamma_total);

// Mean of MtP(tau, gamma_total): gamma * int s tau(s) ds / psi(gamma).
double mtp_mean(const LevyParams& p, double gamma_total);

// Upper incomplete gamma Gamma(a, x) for a in (-1, 1], x > 0 (unnormalized).
// Supports the negative orders needed by generalized-gamma tail masses.
double upper_incomplete_gamma(double a, double x);

// Tail mass int_x^inf tau(s) ds of a generalized-gamma Levy density.
double levy_tail_mass(const LevyParams& p, double x);

}  // namespace phibp

#endif
