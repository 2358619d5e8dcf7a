#include "phibp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace phibp {

namespace {

// Implicit-QL eigen decomposition of a symmetric tridiagonal matrix (diagonal d,
// subdiagonal e), tracking only the first row of the eigenvector matrix; this is
// the classic tqli/imtql2 iteration specialized for Golub-Welsch.
void tridiag_eigen_first_row(std::vector<double>& d, std::vector<double>& e,
                             std::vector<double>& z) {
  const int n = int(d.size());
  z.assign(size_t(n), 0.0);
  if (n == 0) return;
  z[0] = 1.0;
  if (n == 1) return;
  e.resize(size_t(n), 0.0);  // sentinel slot

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[size_t(m)]) + std::fabs(d[size_t(m + 1)]);
        if (std::fabs(e[size_t(m)]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("gauss_laguerre: QL iteration failed to converge");
        double g = (d[size_t(l + 1)] - d[size_t(l)]) / (2.0 * e[size_t(l)]);
        double r = std::hypot(g, 1.0);
        g = d[size_t(m)] - d[size_t(l)] + e[size_t(l)] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[size_t(i)];
          double b = c * e[size_t(i)];
          r = std::hypot(f, g);
          e[size_t(i + 1)] = r;
          if (r == 0.0) {
            d[size_t(i + 1)] -= p;
            e[size_t(m)] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[size_t(i + 1)] - p;
          r = (d[size_t(i)] - g) * s + 2.0 * c * b;
          p = s * r;
          d[size_t(i + 1)] = g + p;
          g = c * r - b;
          double f2 = z[size_t(i + 1)];
          z[size_t(i + 1)] = s * z[size_t(i)] + c * f2;
          z[size_t(i)] = c * z[size_t(i)] - s * f2;
        }
        if (r == 0.0 && i >= l) continue;
        d[size_t(l)] -= p;
        e[size_t(l)] = g;
        e[size_t(m)] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

GaussLaguerre gauss_laguerre(int n, double a) {
  if (n < 1) throw std::domain_error("gauss_laguerre: n must be >= 1");
  if (!(a > -1.0)) throw std::domain_error("gauss_laguerre: a must be > -1");
  std::vector<double> d(static_cast<size_t>(n)), e(static_cast<size_t>(n > 1 ? n - 1 : 0)), z;
  for (int i = 0; i < n; ++i) d[size_t(i)] = 2.0 * i + 1.0 + a;
  for (int i = 0; i + 1 < n; ++i) e[size_t(i)] = std::sqrt((i + 1.0) * (i + 1.0 + a));
  tridiag_eigen_first_row(d, e, z);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return d[size_t(i)] < d[size_t(j)]; });

  GaussLaguerre out;
  out.nodes.resize(size_t(n));
  out.log_weights.resize(size_t(n));
  const double lg = std::lgamma(a + 1.0);
  for (int i = 0; i < n; ++i) {
    out.nodes[size_t(i)] = d[size_t(order[size_t(i)])];
    double zi = z[size_t(order[size_t(i)])];
    out.log_weights[size_t(i)] = lg + 2.0 * std::log(std::fabs(zi) + 1e-320);
  }
  return out;
}

}  // namespace phibp
