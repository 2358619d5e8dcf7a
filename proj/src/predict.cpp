#include "phibp/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "phibp/quadrature.hpp"

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// sigma-tilde for one (group, new species) cell on the post-prediction scale:
// rate R = gamma_total + m_j + zeta.
double assemble_sigma(Rng& rng, const LevyParams& pj, double rate_total, double h,
                      const std::vector<long>& otu_counts) {
  double sigma;
  if (pj.is_gamma()) {
    sigma = rng.gamma_rate(pj.theta * h, rate_total);
  } else {
    double y = pj.theta / pj.alpha * std::pow(rate_total, pj.alpha) * h;
    sigma = rng.tilted_stable(pj.alpha, y, 1.0) / rate_total;
  }
  for (long c : otu_counts) sigma += rng.gamma_rate(double(c) - pj.alpha, rate_total);
  return sigma;
}

}  // namespace

PredictiveDraw sample_predictive(Rng& rng, const PosteriorAbundanceDraw& post,
                                 const std::vector<double>& gamma_totals,
                                 const std::vector<double>& m_new) {
  const int J = post.num_groups();
  const long r = post.num_species();
  if (int(gamma_totals.size()) != J || int(m_new.size()) != J)
    throw std::domain_error("sample_predictive: dimension mismatch");
  for (double m : m_new)
    if (m < 0.0) throw std::domain_error("sample_predictive: m must be >= 0");

  const HyperParams& hp = post.params;
  LevyParams base{hp.alpha0, hp.theta0, post.zeta0};
  std::vector<LevyParams> gp(static_cast<size_t>(J));
  std::vector<LevyParams> gp_tilted(static_cast<size_t>(J));  // zeta_j + M_j, for new OTU counts

  PredictiveDraw out;
  out.m = m_new;
  out.kappa_star.assign(size_t(J), 0.0);
  double kappa_tot = 0.0, kappa_star_tot = 0.0;
  for (int j = 0; j < J; ++j) {
    gp[size_t(j)] = LevyParams{hp.alpha[size_t(j)], hp.theta[size_t(j)], post.zeta_group};
    gp_tilted[size_t(j)] =
        LevyParams{hp.alpha[size_t(j)], hp.theta[size_t(j)],
                   post.zeta_group + gamma_totals[size_t(j)]};
    double k0 = laplace_exponent(gp[size_t(j)], gamma_totals[size_t(j)]);
    double k1 = laplace_exponent(gp[size_t(j)], gamma_totals[size_t(j)] + m_new[size_t(j)]);
    out.kappa_star[size_t(j)] = k1 - k0;
    kappa_tot += k0;
    kappa_star_tot += out.kappa_star[size_t(j)];
  }
  out.comp2_blocks.assign(size_t(J), std::vector<long>(size_t(r), 0));
  out.comp2_otu_counts.assign(size_t(J), std::vector<std::vector<long>>(size_t(r)));
  out.comp2_counts.assign(size_t(J), std::vector<long>(size_t(r), 0));
  out.comp3_increments.assign(size_t(J), std::vector<std::vector<long>>(size_t(r)));
  out.comp3_counts.assign(size_t(J), std::vector<long>(size_t(r), 0));
  if (kappa_star_tot <= 0.0) return out;  // m = 0 everywhere

  // Component 1: completely new species.
  LevyParams tilted_base{hp.alpha0, hp.theta0, post.zeta0 + kappa_tot};
  double phi_star_mean = laplace_exponent(base, kappa_tot + kappa_star_tot) -
                         laplace_exponent(base, kappa_tot);
  long phi_star = rng.poisson(phi_star_mean);
  std::vector<double> q(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) q[size_t(j)] = out.kappa_star[size_t(j)] / kappa_star_tot;
  double qs = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= qs;
  for (long v = 0; v < phi_star; ++v) {
    PredictedNewSpecies sp;
    sp.x_total = rng.mtp(tilted_base, kappa_star_tot);
    sp.h = rng.gamma_rate(double(sp.x_total) - hp.alpha0,
                          post.zeta0 + kappa_tot + kappa_star_tot);
    auto split = rng.multinomial(sp.x_total, q);
    sp.x.assign(split.begin(), split.end());
    sp.otu_counts.resize(size_t(J));
    sp.counts.assign(size_t(J), 0);
    sp.sigma_tilde.assign(size_t(J), 0.0);
    for (int j = 0; j < J; ++j) {
      for (long k = 0; k < sp.x[size_t(j)]; ++k) {
        long c = rng.mtp(gp_tilted[size_t(j)], m_new[size_t(j)]);
        sp.otu_counts[size_t(j)].push_back(c);
        sp.counts[size_t(j)] += c;
      }
      double rate_total = gamma_totals[size_t(j)] + m_new[size_t(j)] + post.zeta_group;
      sp.sigma_tilde[size_t(j)] =
          assemble_sigma(rng, gp[size_t(j)], rate_total, sp.h, sp.otu_counts[size_t(j)]);
    }
    out.new_species.push_back(std::move(sp));
  }

  // Component 2: new OTUs for existing species; component 3: increments on
  // existing OTUs.
  for (int j = 0; j < J; ++j) {
    if (!(m_new[size_t(j)] > 0.0)) continue;
    for (long l = 0; l < r; ++l) {
      long blocks = rng.poisson(post.h[size_t(l)] * out.kappa_star[size_t(j)]);
      out.comp2_blocks[size_t(j)][size_t(l)] = blocks;
      for (long k = 0; k < blocks; ++k) {
        long c = rng.mtp(gp_tilted[size_t(j)], m_new[size_t(j)]);
        out.comp2_otu_counts[size_t(j)][size_t(l)].push_back(c);
        out.comp2_counts[size_t(j)][size_t(l)] += c;
      }
      const auto& cell = post.cells[size_t(j)][size_t(l)];
      auto& inc = out.comp3_increments[size_t(j)][size_t(l)];
      inc.resize(cell.otu_rates.size());
      for (size_t k = 0; k < cell.otu_rates.size(); ++k) {
        inc[k] = rng.poisson(m_new[size_t(j)] * cell.otu_rates[k]);
        out.comp3_counts[size_t(j)][size_t(l)] += inc[k];
      }
    }
  }
  return out;
}

NewGroupDraw sample_new_group(Rng& rng, const PosteriorAbundanceDraw& post,
                              const std::vector<double>& gamma_totals,
                              const LevyParams& new_group, double gamma_new) {
  new_group.validate();
  if (gamma_new < 0.0) throw std::domain_error("sample_new_group: gamma_new >= 0");
  const int J = post.num_groups();
  const HyperParams& hp = post.params;
  LevyParams base{hp.alpha0, hp.theta0, post.zeta0};
  double kappa_tot = 0.0;
  for (int j = 0; j < J; ++j) {
    LevyParams pj{hp.alpha[size_t(j)], hp.theta[size_t(j)], post.zeta_group};
    kappa_tot += laplace_exponent(pj, gamma_totals[size_t(j)]);
  }
  NewGroupDraw out;
  if (gamma_new == 0.0) return out;
  out.kappa_new = laplace_exponent(new_group, gamma_new);
  LevyParams tilted_base{hp.alpha0, hp.theta0, post.zeta0 + kappa_tot};

  double mean = laplace_exponent(base, kappa_tot + out.kappa_new) -
                laplace_exponent(base, kappa_tot);
  out.num_new_species = rng.poisson(mean);
  for (long v = 0; v < out.num_new_species; ++v) {
    long x = rng.mtp(tilted_base, out.kappa_new);
    out.new_species_blocks.push_back(x);
    out.new_species_h.push_back(rng.gamma_rate(double(x) - hp.alpha0,
                                               post.zeta0 + kappa_tot + out.kappa_new));
    long n = 0;
    for (long k = 0; k < x; ++k) n += rng.mtp(new_group, gamma_new);
    out.new_species_counts.push_back(n);
  }
  out.existing_blocks.assign(size_t(post.num_species()), 0);
  out.existing_counts.assign(size_t(post.num_species()), 0);
  for (long l = 0; l < post.num_species(); ++l) {
    long blocks = rng.poisson(post.h[size_t(l)] * out.kappa_new);
    out.existing_blocks[size_t(l)] = blocks;
    for (long k = 0; k < blocks; ++k)
      out.existing_counts[size_t(l)] += rng.mtp(new_group, gamma_new);
  }
  return out;
}

std::vector<double> unseen_entropy(Rng& rng, const PosteriorAbundanceDraw& post,
                                   const std::vector<double>& gamma_totals,
                                   const std::vector<double>& m_new) {
  const int J = post.num_groups();
  PredictiveDraw draw = sample_predictive(rng, post, gamma_totals, m_new);
  std::vector<double> out(static_cast<size_t>(J), std::numeric_limits<double>::quiet_NaN());
  if (draw.new_species.empty()) return out;
  for (int j = 0; j < J; ++j) {
    if (!(m_new[size_t(j)] > 0.0)) continue;
    double total = 0.0;
    for (const auto& sp : draw.new_species) total += sp.sigma_tilde[size_t(j)];
    double ent = 0.0;
    for (const auto& sp : draw.new_species) {
      double w = sp.sigma_tilde[size_t(j)] / total;
      if (w > 0.0) ent -= w * std::log(w);
    }
    out[size_t(j)] = ent;
  }
  return out;
}

AlignedTest align_test_matrix(const CountMatrix& train, const CountMatrix& test) {
  const int J = train.num_groups();
  if (test.num_groups() != J)
    throw std::runtime_error("align_test_matrix: group count mismatch");
  for (int j = 0; j < J; ++j)
    if (test.group_ids[size_t(j)] != train.group_ids[size_t(j)])
      throw std::runtime_error("align_test_matrix: group ids must match in order");
  std::map<std::string, long> train_col;
  for (long l = 0; l < train.num_species(); ++l) train_col[train.species_ids[size_t(l)]] = l;

  AlignedTest out;
  out.existing.assign(size_t(J), std::vector<long>(size_t(train.num_species()), 0));
  std::vector<long> novel_cols;
  for (long t = 0; t < test.num_species(); ++t) {
    auto it = train_col.find(test.species_ids[size_t(t)]);
    bool novel = (it == train_col.end());
    if (!novel && train.column_total(it->second) == 0) novel = true;  // all-zero column
    if (novel) {
      if (test.column_total(t) > 0) {
        novel_cols.push_back(t);
        out.novel_ids.push_back(test.species_ids[size_t(t)]);
      }
      continue;
    }
    for (int j = 0; j < J; ++j) out.existing[size_t(j)][size_t(it->second)] = test.at(j, t);
  }
  out.novel.assign(size_t(J), std::vector<long>(novel_cols.size(), 0));
  for (size_t c = 0; c < novel_cols.size(); ++c)
    for (int j = 0; j < J; ++j) out.novel[size_t(j)][c] = test.at(j, novel_cols[c]);
  return out;
}

namespace {

// Cache of Gauss-Laguerre rules keyed by the weight exponent.
class RuleCache {
 public:
  explicit RuleCache(int nodes) : nodes_(nodes) {}
  const GaussLaguerre& get(double a) {
    auto it = rules_.find(a);
    if (it == rules_.end()) it = rules_.emplace(a, gauss_laguerre(nodes_, a)).first;
    return it->second;
  }

 private:
  int nodes_;
  std::map<double, GaussLaguerre> rules_;
};

// log coefficients of g_j(lambda) = sum_x lambda^x theta^x S_alpha(n,x) rr^{alpha x - n}
// for one group and test count n (novel-species block); index 0 holds x = 0,
// admissible only when n = 0.
std::vector<double> novel_group_log_coeffs(const LevyParams& pj, const StirlingTable& table,
                                           long n, double rr) {
  if (n == 0) return {0.0};
  std::vector<double> lc(size_t(n + 1), kNegInf);
  double lrr = std::log(rr), lth = std::log(pj.theta);
  for (long x = 1; x <= n; ++x)
    lc[size_t(x)] = double(x) * lth + table.log_s(int(n), int(x)) +
                    (pj.alpha * double(x) - double(n)) * lrr;
  return lc;
}

double poly_log_eval(const std::vector<double>& log_coeffs, double log_lambda) {
  std::vector<double> terms;
  terms.reserve(log_coeffs.size());
  for (size_t x = 0; x < log_coeffs.size(); ++x)
    if (log_coeffs[x] != kNegInf) terms.push_back(log_coeffs[x] + double(x) * log_lambda);
  return log_sum_exp(terms);
}

// log NB(t; shape, p) = log Gamma(t+shape) - log t! - log Gamma(shape)
//                       + shape log(1-p) + t log p   (shape 0: point mass at 0)
double log_nb(long t, double shape, double log_p, double log_1mp) {
  if (shape <= 0.0) return t == 0 ? 0.0 : kNegInf;
  if (t == 0) return shape * log_1mp;  // keeps 0 * log(0) out of the sum
  return std::lgamma(double(t) + shape) - std::lgamma(double(t) + 1.0) -
         std::lgamma(shape) + shape * log_1mp + double(t) * log_p;
}

}  // namespace

PredictiveLoglik predictive_loglik(const CountMatrix& train,
                                   const std::vector<std::vector<long>>& x_latent,
                                   const HyperParams& hp, double zeta0,
                                   double zeta_group, const AlignedTest& test,
                                   const std::vector<double>& m_new, int quad_nodes) {
  const int J = train.num_groups();
  const long r = train.num_species();
  if (int(m_new.size()) != J) throw std::domain_error("predictive_loglik: m size");
  if (int(x_latent.size()) != J || (r > 0 && long(x_latent[0].size()) != r))
    throw std::domain_error("predictive_loglik: x_latent shape");
  if (quad_nodes < 1) throw std::domain_error("predictive_loglik: quad_nodes >= 1");
  LevyParams base{hp.alpha0, hp.theta0, zeta0};
  base.validate();

  std::vector<LevyParams> gp(static_cast<size_t>(J));
  std::vector<double> kappa(static_cast<size_t>(J)), kappa_star(static_cast<size_t>(J));
  double kappa_tot = 0.0, kappa_star_tot = 0.0;
  for (int j = 0; j < J; ++j) {
    gp[size_t(j)] = LevyParams{hp.alpha[size_t(j)], hp.theta[size_t(j)], zeta_group};
    double g = train.sample_sizes[size_t(j)];
    kappa[size_t(j)] = laplace_exponent(gp[size_t(j)], g);
    kappa_star[size_t(j)] =
        laplace_exponent(gp[size_t(j)], g + m_new[size_t(j)]) - kappa[size_t(j)];
    kappa_tot += kappa[size_t(j)];
    kappa_star_tot += kappa_star[size_t(j)];
  }
  const double zt0 = zeta0 + kappa_tot;                    // tilted base rate
  const double zt0_new = zt0 + kappa_star_tot;             // after new samples
  const double lambda0 = laplace_exponent(base, kappa_tot + kappa_star_tot) -
                         laplace_exponent(base, kappa_tot);

  // one Stirling table per group covering every test count it will meet
  const long r_star_pre = test.novel.empty() ? 0 : long(test.novel[0].size());
  std::vector<StirlingTable> tables;
  tables.reserve(size_t(J));
  for (int j = 0; j < J; ++j) {
    long max_n = 1;
    for (long l = 0; l < r; ++l)
      if (!test.existing.empty())
        max_n = std::max(max_n, test.existing[size_t(j)][size_t(l)]);
    for (long v = 0; v < r_star_pre; ++v)
      max_n = std::max(max_n, test.novel[size_t(j)][size_t(v)]);
    tables.emplace_back(gp[size_t(j)].alpha, int(max_n));
  }

  RuleCache rules(quad_nodes);
  PredictiveLoglik out;

  // ---- novel species block -------------------------------------------------
  const long r_star = test.novel.empty() ? 0 : long(test.novel[0].size());
  if (kappa_star_tot > 0.0 || r_star > 0) {
    out.novel = -lambda0 + double(r_star) * std::log(hp.theta0) -
                std::lgamma(double(r_star) + 1.0);
    const auto& rule = rules.get(-hp.alpha0);
    for (long v = 0; v < r_star; ++v) {
      long n_total = 0;
      std::vector<std::vector<double>> lc(static_cast<size_t>(J));
      for (int j = 0; j < J; ++j) {
        long n = test.novel[size_t(j)][size_t(v)];
        n_total += n;
        double rr = zeta_group + train.sample_sizes[size_t(j)] + m_new[size_t(j)];
        lc[size_t(j)] = novel_group_log_coeffs(gp[size_t(j)], tables[size_t(j)], n, rr);
        if (n > 0) {
          if (!(m_new[size_t(j)] > 0.0)) {
            out.novel = kNegInf;  // counts without any new sampling effort
          } else {
            out.novel += double(n) * std::log(m_new[size_t(j)]) -
                         std::lgamma(double(n) + 1.0);
          }
        }
      }
      if (n_total == 0)
        throw std::domain_error("predictive_loglik: novel species with all-zero counts");
      if (out.novel == kNegInf) break;
      // integral of prod_j g_j(lambda) lambda^{-alpha0-1} e^{-zt0_new lambda};
      // substituting u = zt0_new * lambda and peeling one power of u leaves a
      // polynomial against the u^{-alpha0} e^{-u} weight.
      std::vector<double> terms(rule.nodes.size());
      for (size_t i = 0; i < rule.nodes.size(); ++i) {
        double log_lam = std::log(rule.nodes[i]) - std::log(zt0_new);
        double s = rule.log_weights[i] - std::log(rule.nodes[i]);
        for (int j = 0; j < J; ++j) s += poly_log_eval(lc[size_t(j)], log_lam);
        terms[i] = s;
      }
      out.novel += log_sum_exp(terms) + hp.alpha0 * std::log(zt0_new) -
                   std::lgamma(1.0 - hp.alpha0);
    }
  }

  // ---- existing species ----------------------------------------------------
  for (long l = 0; l < r; ++l) {
    long x_l = 0;
    for (int j = 0; j < J; ++j) x_l += x_latent[size_t(j)][size_t(l)];
    if (x_l < 1) throw std::domain_error("predictive_loglik: x_l must be >= 1");
    if (kappa_star_tot == 0.0) {
      bool all_zero = true;
      for (int j = 0; j < J; ++j)
        if (!test.existing.empty() && test.existing[size_t(j)][size_t(l)] > 0)
          all_zero = false;
      if (all_zero) continue;  // no exposure, no counts: factor is exactly 1
    }

    // per group: log coefficients of f_j(lambda) = e^{-lambda kappa*_j} poly_j(lambda)
    std::vector<std::vector<double>> lc(static_cast<size_t>(J));
    bool impossible = false;
    for (int j = 0; j < J; ++j) {
      long n4 = test.existing.empty() ? 0 : test.existing[size_t(j)][size_t(l)];
      long n_tr = train.at(j, l);
      long x_tr = x_latent[size_t(j)][size_t(l)];
      double mj = m_new[size_t(j)];
      double R = train.sample_sizes[size_t(j)] + zeta_group;
      double ztj = R + mj;
      double shape3 = double(n_tr) - gp[size_t(j)].alpha * double(x_tr);
      if (n4 > 0 && !(mj > 0.0)) {
        impossible = true;
        break;
      }
      double log_p = mj > 0.0 ? std::log(mj / ztj) : kNegInf;
      double log_1mp = std::log(R / ztj);
      // NB tail from increments on existing OTU mass Gamma(shape3, R)
      std::vector<double> log_nb3(size_t(n4 + 1));
      for (long t = 0; t <= n4; ++t)
        log_nb3[size_t(t)] = log_nb(t, shape3, log_p, log_1mp);
      // coefficients over s = number of new OTU blocks
      std::vector<double> coeff(size_t(n4 + 1), kNegInf);
      coeff[0] = log_nb3[size_t(n4)];  // s = 0: all new counts are increments
      if (n4 > 0 && mj > 0.0) {
        double lth = std::log(gp[size_t(j)].theta);
        double lm = std::log(mj);
        double lzt = std::log(ztj);
        for (long s = 1; s <= n4; ++s) {
          std::vector<double> acc;
          acc.reserve(size_t(n4 - s + 1));
          for (long w = s; w <= n4; ++w) {
            double term = double(w) * lm + double(s) * lth +
                          tables[size_t(j)].log_s(int(w), int(s)) +
                          (gp[size_t(j)].alpha * double(s) - double(w)) * lzt -
                          std::lgamma(double(w) + 1.0) + log_nb3[size_t(n4 - w)];
            acc.push_back(term);
          }
          coeff[size_t(s)] = log_sum_exp(acc);
        }
      }
      lc[size_t(j)] = std::move(coeff);
    }
    if (impossible) {
      out.existing = kNegInf;
      break;
    }
    // integral against Gamma(x_l - alpha0, zt0) density with the extra
    // e^{-lambda kappa*_tot} tilt
    double a = double(x_l) - hp.alpha0 - 1.0;
    const auto& rule = rules.get(a);
    std::vector<double> terms(rule.nodes.size());
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      double log_lam = std::log(rule.nodes[i]) - std::log(zt0 + kappa_star_tot);
      double s = rule.log_weights[i];
      for (int j = 0; j < J; ++j) s += poly_log_eval(lc[size_t(j)], log_lam);
      terms[i] = s;
    }
    out.existing += log_sum_exp(terms) - std::lgamma(double(x_l) - hp.alpha0) +
                    (double(x_l) - hp.alpha0) *
                        (std::log(zt0) - std::log(zt0 + kappa_star_tot));
  }
  return out;
}

}  // namespace phibp
