#ifndef PHIBP_QUADRATURE_HPP
#define PHIBP_QUADRATURE_HPP

#include <vector>

namespace phibp {

// Generalized Gauss-Laguerre rule: sum_i w_i f(u_i) approximates
// int_0^inf u^a e^{-u} f(u) du, exact for polynomials f of degree <= 2n-1.
// Weights are returned in log space (they reach Gamma(a+1), which overflows for
// the large shape parameters this code meets).
struct GaussLaguerre {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

// Golub-Welsch on the Laguerre Jacobi matrix; a > -1, n >= 1.
GaussLaguerre gauss_laguerre(int n, double a);

}  // namespace phibp

#endif
