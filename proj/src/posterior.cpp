#include "phibp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long sample_discrete_from_logs(Rng& rng, const std::vector<double>& lw) {
  double mx = *std::max_element(lw.begin(), lw.end());
  double total = 0.0;
  std::vector<double> w(lw.size());
  for (size_t i = 0; i < lw.size(); ++i) {
    w[i] = std::exp(lw[i] - mx);
    total += w[i];
  }
  double u = rng.uniform() * total;
  double cum = 0.0;
  for (size_t i = 0; i < lw.size(); ++i) {
    cum += w[i];
    if (u <= cum) return long(i);
  }
  return long(lw.size()) - 1;
}

}  // namespace

long sample_block_count(Rng& rng, const LevyParams& pj, const StirlingTable& table,
                        long n, double h, double gamma_total) {
  if (n == 0) return 0;
  if (!(h > 0.0)) throw std::domain_error("sample_block_count: h must be > 0");
  std::vector<double> lw(static_cast<size_t>(n));
  double lh = std::log(h);
  for (long xv = 1; xv <= n; ++xv)
    lw[size_t(xv - 1)] =
        xv * lh + xi_partition_weight(pj, table, int(n), int(xv), gamma_total);
  return 1 + sample_discrete_from_logs(rng, lw);
}

std::vector<long> sample_composition(Rng& rng, const LevyParams& pj,
                                     const StirlingTable& table, long n, long x) {
  if (x < 0 || x > n) throw std::domain_error("sample_composition: need 0 <= x <= n");
  std::vector<long> parts;
  parts.reserve(size_t(x));
  const double a = pj.alpha;
  const double lg1ma = std::lgamma(1.0 - a);
  long rem_n = n, rem_x = x;
  while (rem_x > 0) {
    if (rem_x == 1) {
      parts.push_back(rem_n);
      break;
    }
    // W(n,x) = x! S_a(n,x) / n!; first part c in [1, rem_n - rem_x + 1]
    long cmax = rem_n - rem_x + 1;
    std::vector<double> lw(static_cast<size_t>(cmax));
    for (long c = 1; c <= cmax; ++c) {
      double lw_rest = std::lgamma(double(rem_x - 1) + 1.0) +
                       table.log_s(int(rem_n - c), int(rem_x - 1)) -
                       std::lgamma(double(rem_n - c) + 1.0);
      lw[size_t(c - 1)] = std::lgamma(c - a) - lg1ma - std::lgamma(double(c) + 1.0) + lw_rest;
    }
    long c = 1 + sample_discrete_from_logs(rng, lw);
    parts.push_back(c);
    rem_n -= c;
    rem_x -= 1;
  }
  return parts;
}

std::pair<long, std::vector<long>> sample_latent_given_counts(
    Rng& rng, const LevyParams& pj, const StirlingTable& table, long n, double h,
    double gamma_total) {
  if (n == 0) return {0, {}};
  long x = sample_block_count(rng, pj, table, n, h, gamma_total);
  return {x, sample_composition(rng, pj, table, n, x)};
}

double sample_h(Rng& rng, long x_species_total, const LevyParams& base,
                double kappa_total) {
  if (x_species_total < 1) throw std::domain_error("sample_h: x must be >= 1");
  base.validate();
  double shape = double(x_species_total) - base.alpha;
  return rng.gamma_rate(shape, base.zeta + kappa_total);
}

AbundanceCell sample_abundance(Rng& rng, const LevyParams& pj, double gamma_total,
                               long n, std::vector<long> otu_counts, double h) {
  pj.validate();
  if (!(h > 0.0)) throw std::domain_error("sample_abundance: h must be > 0");
  long sum = std::accumulate(otu_counts.begin(), otu_counts.end(), 0L);
  if (sum != n) throw std::domain_error("sample_abundance: OTU counts must sum to n");
  const double rate = gamma_total + pj.zeta;
  const double tiny = std::numeric_limits<double>::min();
  AbundanceCell cell;
  cell.n = n;
  cell.x = long(otu_counts.size());
  cell.otu_counts = std::move(otu_counts);
  if (pj.is_gamma()) {
    cell.sigma_hat = rng.gamma_rate(pj.theta * h, rate);
  } else {
    double y = pj.theta / pj.alpha * std::pow(rate, pj.alpha) * h;
    cell.sigma_hat = rng.tilted_stable(pj.alpha, y, 1.0) / rate;
  }
  // rates this many orders of magnitude down are kept at the smallest positive
  // normal value so the stored decomposition stays strictly positive
  cell.sigma_hat = std::max(cell.sigma_hat, tiny);
  cell.otu_rates.resize(cell.otu_counts.size());
  cell.sigma_tilde = cell.sigma_hat;
  for (size_t k = 0; k < cell.otu_counts.size(); ++k) {
    double shape = double(cell.otu_counts[k]) - pj.alpha;
    cell.otu_rates[k] = std::max(rng.gamma_rate(shape, rate), tiny);
    cell.sigma_tilde += cell.otu_rates[k];
  }
  return cell;
}

PosteriorAbundanceDraw sample_posterior_draw(Rng& rng, const CountMatrix& counts,
                                             const HyperParams& hp, double zeta0,
                                             double zeta_group, int aug_sweeps) {
  counts.validate();
  const int J = counts.num_groups();
  const long r = counts.num_species();
  if (int(hp.alpha.size()) != J || int(hp.theta.size()) != J)
    throw std::domain_error("sample_posterior_draw: hyperparameter dimension mismatch");
  LevyParams base{hp.alpha0, hp.theta0, zeta0};
  base.validate();

  std::vector<LevyParams> gp(static_cast<size_t>(J));
  std::vector<StirlingTable> tables;
  tables.reserve(size_t(J));
  double kappa_tot = 0.0;
  for (int j = 0; j < J; ++j) {
    gp[size_t(j)] = LevyParams{hp.alpha[size_t(j)], hp.theta[size_t(j)], zeta_group};
    long max_n = 1;
    for (long l = 0; l < r; ++l) max_n = std::max(max_n, counts.at(j, l));
    tables.emplace_back(gp[size_t(j)].alpha, int(max_n));
    kappa_tot += laplace_exponent(gp[size_t(j)], counts.sample_sizes[size_t(j)]);
  }

  std::vector<std::vector<long>> x(static_cast<size_t>(J), std::vector<long>(size_t(r), 0));
  std::vector<long> x_l(static_cast<size_t>(r), 0);
  for (int j = 0; j < J; ++j)
    for (long l = 0; l < r; ++l)
      if (counts.at(j, l) > 0) {
        x[size_t(j)][size_t(l)] = 1;
        x_l[size_t(l)] += 1;
      }

  PosteriorAbundanceDraw draw;
  draw.params = hp;
  draw.zeta0 = zeta0;
  draw.zeta_group = zeta_group;
  draw.kappa_total = kappa_tot;
  draw.h.assign(size_t(r), 0.0);

  for (int sweep = 0; sweep < std::max(1, aug_sweeps); ++sweep) {
    for (long l = 0; l < r; ++l)
      draw.h[size_t(l)] = sample_h(rng, x_l[size_t(l)], base, kappa_tot);
    for (int j = 0; j < J; ++j) {
      for (long l = 0; l < r; ++l) {
        long n = counts.at(j, l);
        if (n == 0) continue;
        long xv = sample_block_count(rng, gp[size_t(j)], tables[size_t(j)], n,
                                     draw.h[size_t(l)], counts.sample_sizes[size_t(j)]);
        x_l[size_t(l)] += xv - x[size_t(j)][size_t(l)];
        x[size_t(j)][size_t(l)] = xv;
      }
    }
  }

  draw.cells.assign(size_t(J), std::vector<AbundanceCell>(size_t(r)));
  for (int j = 0; j < J; ++j) {
    double gtot = counts.sample_sizes[size_t(j)];
    for (long l = 0; l < r; ++l) {
      long n = counts.at(j, l);
      std::vector<long> comp = sample_composition(rng, gp[size_t(j)], tables[size_t(j)],
                                                  n, x[size_t(j)][size_t(l)]);
      draw.cells[size_t(j)][size_t(l)] =
          sample_abundance(rng, gp[size_t(j)], gtot, n, std::move(comp),
                           draw.h[size_t(l)]);
    }
  }
  return draw;
}

std::vector<UnseenAtom> sample_unseen_base(Rng& rng, const HyperParams& hp,
                                           double zeta0, double zeta_group,
                                           const std::vector<double>& gamma_totals,
                                           long budget, double floor) {
  const int J = int(gamma_totals.size());
  if (int(hp.alpha.size()) != J || int(hp.theta.size()) != J)
    throw std::domain_error("sample_unseen_base: dimension mismatch");
  std::vector<UnseenAtom> out;
  if (budget <= 0) return out;

  double kappa_tot = 0.0;
  std::vector<LevyParams> gp(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) {
    gp[size_t(j)] = LevyParams{hp.alpha[size_t(j)], hp.theta[size_t(j)], zeta_group};
    kappa_tot += laplace_exponent(gp[size_t(j)], gamma_totals[size_t(j)]);
  }
  LevyParams tilted{hp.alpha0, hp.theta0, zeta0 + kappa_tot};
  tilted.validate();

  // inverse of the decreasing tail mass T(x) = int_x^inf tau_tilted
  auto invert_tail = [&](double target) {
    double hi = 1.0;
    while (levy_tail_mass(tilted, hi) > target && hi < 1e280) hi *= 4.0;
    double lo = hi;
    while (levy_tail_mass(tilted, lo) < target && lo > 1e-290) lo /= 4.0;
    double llo = std::log(lo), lhi = std::log(hi);
    for (int it = 0; it < 120; ++it) {
      double mid = 0.5 * (llo + lhi);
      if (levy_tail_mass(tilted, std::exp(mid)) > target)
        llo = mid;
      else
        lhi = mid;
    }
    return std::exp(0.5 * (llo + lhi));
  };

  double arrival = 0.0;
  for (long k = 0; k < budget; ++k) {
    arrival += rng.exponential();
    double lambda = invert_tail(arrival);
    if (lambda <= floor) break;
    UnseenAtom atom;
    atom.lambda = lambda;
    atom.group_rates.resize(size_t(J));
    for (int j = 0; j < J; ++j) {
      double rate = gamma_totals[size_t(j)] + zeta_group;
      if (gp[size_t(j)].is_gamma()) {
        atom.group_rates[size_t(j)] = rng.gamma_rate(gp[size_t(j)].theta * lambda, rate);
      } else {
        double y = gp[size_t(j)].theta / gp[size_t(j)].alpha *
                   std::pow(rate, gp[size_t(j)].alpha) * lambda;
        atom.group_rates[size_t(j)] = rng.tilted_stable(gp[size_t(j)].alpha, y, 1.0) / rate;
      }
    }
    out.push_back(std::move(atom));
  }
  return out;
}

}  // namespace phibp
