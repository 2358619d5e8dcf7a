#include "phibp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "phibp/parallel.hpp"

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double logit(double a) { return std::log(a / (1.0 - a)); }
inline double inv_logit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log density of logit-Normal(0,1) at a in (0,1)
inline double log_logit_normal(double a) {
  double z = logit(a);
  return -0.5 * z * z - std::log(a) - std::log1p(-a) - 0.5 * std::log(2.0 * M_PI);
}
// log density of log-Normal(0,1) at t > 0
inline double log_log_normal(double t) {
  double z = std::log(t);
  return -0.5 * z * z - z - 0.5 * std::log(2.0 * M_PI);
}

inline double psi_value(double alpha, double theta, double zeta, double t) {
  LevyParams p{alpha, theta, zeta};
  return laplace_exponent(p, t);
}

}  // namespace

void FitConfig::validate() const {
  if (chains < 1) throw std::domain_error("FitConfig: chains must be >= 1");
  if (burn_in < 0 || steps <= burn_in)
    throw std::domain_error("FitConfig: need steps > burn_in >= 0");
  if (thin < 1) throw std::domain_error("FitConfig: thin must be >= 1");
  if (!(delta > 0.0)) throw std::domain_error("FitConfig: delta must be > 0");
  if (!(zeta0 > 0.0) || !(zeta_group > 0.0))
    throw std::domain_error("FitConfig: zetas must be > 0");
}

int hyper_param_count(int num_groups) { return 2 + 2 * num_groups; }

std::vector<std::string> hyper_param_names(int num_groups) {
  std::vector<std::string> names{"alpha0", "theta0"};
  for (int j = 1; j <= num_groups; ++j) {
    names.push_back("alpha" + std::to_string(j));
    names.push_back("theta" + std::to_string(j));
  }
  return names;
}

bool param_is_alpha(int param_index) {
  return param_index == 0 || (param_index >= 2 && (param_index - 2) % 2 == 0);
}

double record_param(const ChainRecord& rec, int param_index) {
  if (param_index == 0) return rec.params.alpha0;
  if (param_index == 1) return rec.params.theta0;
  int j = (param_index - 2) / 2;
  return (param_index % 2 == 0) ? rec.params.alpha[size_t(j)]
                                : rec.params.theta[size_t(j)];
}

LatentState::LatentState(const CountMatrix& counts, HyperParams init, double zeta0,
                         double zeta_group)
    : counts_(&counts),
      J_(counts.num_groups()),
      r_(counts.num_species()),
      hp_(std::move(init)),
      zeta0_(zeta0),
      zeta_g_(zeta_group) {
  counts.validate();
  if (int(hp_.alpha.size()) != J_ || int(hp_.theta.size()) != J_)
    throw std::domain_error("LatentState: hyperparameter dimension mismatch");
  for (long l = 0; l < r_; ++l)
    if (counts.column_total(l) < 1)
      throw std::domain_error("LatentState: observed species must have a positive count");

  cells_.resize(size_t(J_));
  group_max_n_.assign(size_t(J_), 0);
  lgam_const_.assign(size_t(J_), 0.0);
  x_.assign(size_t(J_), std::vector<long>(size_t(r_), 0));
  for (int j = 0; j < J_; ++j) {
    double lg_gamma = std::log(counts.sample_sizes[size_t(j)]);
    double lg_rate = std::log(counts.sample_sizes[size_t(j)] + zeta_g_);
    for (long l = 0; l < r_; ++l) {
      long n = counts.at(j, l);
      if (n > 0) {
        cells_[size_t(j)].push_back(l);
        group_max_n_[size_t(j)] = std::max(group_max_n_[size_t(j)], n);
        lgam_const_[size_t(j)] +=
            n * lg_gamma - n * lg_rate - std::lgamma(double(n) + 1.0);
        x_[size_t(j)][size_t(l)] = 1;
      }
    }
  }
  tables_.resize(size_t(J_));
  for (int j = 0; j < J_; ++j)
    tables_[size_t(j)] = std::make_unique<StirlingTable>(
        hp_.alpha[size_t(j)], std::max<long>(1, group_max_n_[size_t(j)]));
  rebuild_caches();
}

void LatentState::rebuild_caches() {
  x_l_.assign(size_t(r_), 0);
  x_dot_ = 0;
  sum_x_group_.assign(size_t(J_), 0);
  stir_sum_.assign(size_t(J_), 0.0);
  kappa_.assign(size_t(J_), 0.0);
  kappa_dot_ = 0.0;
  for (int j = 0; j < J_; ++j) {
    for (long l : cells_[size_t(j)]) {
      long xv = x_[size_t(j)][size_t(l)];
      x_l_[size_t(l)] += xv;
      x_dot_ += xv;
      sum_x_group_[size_t(j)] += xv;
      stir_sum_[size_t(j)] +=
          tables_[size_t(j)]->log_s(int(counts_->at(j, l)), int(xv));
    }
    kappa_[size_t(j)] = psi_value(hp_.alpha[size_t(j)], hp_.theta[size_t(j)], zeta_g_,
                                  counts_->sample_sizes[size_t(j)]);
    kappa_dot_ += kappa_[size_t(j)];
  }
  psi0_kappa_ = psi_value(hp_.alpha0, hp_.theta0, zeta0_, kappa_dot_);
}

void LatentState::set_x(int j, long l, long value) {
  long n = counts_->at(j, l);
  if (n == 0) {
    if (value != 0) throw std::domain_error("set_x: X must be 0 where n = 0");
    return;
  }
  if (value < 1 || value > n) throw std::domain_error("set_x: X out of support");
  long old = x_[size_t(j)][size_t(l)];
  if (old == value) return;
  const auto& tab = *tables_[size_t(j)];
  stir_sum_[size_t(j)] += tab.log_s(int(n), int(value)) - tab.log_s(int(n), int(old));
  x_[size_t(j)][size_t(l)] = value;
  x_l_[size_t(l)] += value - old;
  x_dot_ += value - old;
  sum_x_group_[size_t(j)] += value - old;
}

void LatentState::set_params(const HyperParams& hp) {
  if (int(hp.alpha.size()) != J_ || int(hp.theta.size()) != J_)
    throw std::domain_error("set_params: dimension mismatch");
  for (int j = 0; j < J_; ++j) {
    if (hp.alpha[size_t(j)] != hp_.alpha[size_t(j)])
      tables_[size_t(j)] = std::make_unique<StirlingTable>(
          hp.alpha[size_t(j)], std::max<long>(1, group_max_n_[size_t(j)]));
  }
  hp_ = hp;
  rebuild_caches();
}

double LatentState::alpha0_block(double a0) const {
  double out = -psi_value(a0, hp_.theta0, zeta0_, kappa_dot_);
  out -= (double(x_dot_) - a0 * double(r_)) * std::log(zeta0_ + kappa_dot_);
  for (long l = 0; l < r_; ++l) out += std::lgamma(double(x_l_[size_t(l)]) - a0);
  out -= double(r_) * std::lgamma(1.0 - a0);
  return out;
}

double LatentState::group_block(int j, double alpha_j, double theta_j,
                                double* stir_sum_out) const {
  double stir;
  if (alpha_j == hp_.alpha[size_t(j)]) {
    stir = stir_sum_[size_t(j)];
  } else {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(cells_[size_t(j)].size());
    for (long l : cells_[size_t(j)])
      pairs.emplace_back(int(counts_->at(j, l)), int(x_[size_t(j)][size_t(l)]));
    auto vals = StirlingTable::log_s_batch(alpha_j, pairs);
    stir = std::accumulate(vals.begin(), vals.end(), 0.0);
  }
  if (stir_sum_out) *stir_sum_out = stir;
  double lg_rate = std::log(counts_->sample_sizes[size_t(j)] + zeta_g_);
  return double(sum_x_group_[size_t(j)]) * (std::log(theta_j) + alpha_j * lg_rate) +
         stir + lgam_const_[size_t(j)];
}

double LatentState::log_likelihood() const {
  double out = double(r_) * std::log(hp_.theta0) - std::lgamma(double(r_) + 1.0);
  out += alpha0_block(hp_.alpha0);
  for (int j = 0; j < J_; ++j)
    out += group_block(j, hp_.alpha[size_t(j)], hp_.theta[size_t(j)], nullptr);
  return out;
}

double LatentState::log_likelihood_fresh() const {
  LatentState copy(*counts_, hp_, zeta0_, zeta_g_);
  for (int j = 0; j < J_; ++j)
    for (long l : cells_[size_t(j)]) copy.set_x(j, l, x_[size_t(j)][size_t(l)]);
  return copy.log_likelihood();
}

double LatentState::log_prior(PriorKind prior) const {
  double out = log_log_normal(hp_.theta0);
  for (int j = 0; j < J_; ++j) out += log_log_normal(hp_.theta[size_t(j)]);
  if (prior == PriorKind::GG) {
    out += log_logit_normal(hp_.alpha0);
    for (int j = 0; j < J_; ++j) out += log_logit_normal(hp_.alpha[size_t(j)]);
  }
  return out;
}

void LatentState::check_cache_integrity(double tol) const {
  LatentState fresh(*counts_, hp_, zeta0_, zeta_g_);
  for (int j = 0; j < J_; ++j)
    for (long l : cells_[size_t(j)]) fresh.set_x(j, l, x_[size_t(j)][size_t(l)]);
  auto close = [&](double a, double b) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
  };
  if (fresh.x_dot_ != x_dot_) throw std::runtime_error("cache drift: x_dot");
  for (long l = 0; l < r_; ++l)
    if (fresh.x_l_[size_t(l)] != x_l_[size_t(l)])
      throw std::runtime_error("cache drift: x_l");
  if (!close(fresh.kappa_dot_, kappa_dot_)) throw std::runtime_error("cache drift: kappa");
  if (!close(fresh.psi0_kappa_, psi0_kappa_))
    throw std::runtime_error("cache drift: psi0(kappa)");
  for (int j = 0; j < J_; ++j)
    if (!close(fresh.stir_sum_[size_t(j)], stir_sum_[size_t(j)]))
      throw std::runtime_error("cache drift: stirling sums");
}

std::vector<double> LatentState::gibbs_log_weights(int j, long l) const {
  long n = counts_->at(j, l);
  if (n < 1) throw std::domain_error("gibbs_log_weights: cell has n = 0");
  long others = x_l_[size_t(l)] - x_[size_t(j)][size_t(l)];
  double lg_rate = std::log(counts_->sample_sizes[size_t(j)] + zeta_g_);
  double slope = std::log(hp_.theta[size_t(j)]) + hp_.alpha[size_t(j)] * lg_rate -
                 std::log(zeta0_ + kappa_dot_);
  auto row = tables_[size_t(j)]->row(int(n));
  std::vector<double> lw(static_cast<size_t>(n));
  double lgam = std::lgamma(1.0 + double(others) - hp_.alpha0);
  for (long xv = 1; xv <= n; ++xv) {
    lw[size_t(xv - 1)] = lgam + double(xv) * slope + row[size_t(xv - 1)];
    lgam += std::log(double(xv) + double(others) - hp_.alpha0);
  }
  return lw;
}

void gibbs_update_x(Rng& rng, LatentState& state) {
  const CountMatrix& counts = state.counts();
  for (int j = 0; j < state.num_groups(); ++j) {
    for (long l : state.cells_[size_t(j)]) {
      long n = counts.at(j, l);
      if (n == 1) {
        state.set_x(j, l, 1);
        continue;
      }
      auto lw = state.gibbs_log_weights(j, l);
      double mx = *std::max_element(lw.begin(), lw.end());
      double total = 0.0;
      for (double& v : lw) {
        v = std::exp(v - mx);
        total += v;
      }
      double u = rng.uniform() * total;
      long pick = n;
      double cum = 0.0;
      for (long xv = 1; xv <= n; ++xv) {
        cum += lw[size_t(xv - 1)];
        if (u <= cum) {
          pick = xv;
          break;
        }
      }
      state.set_x(j, l, pick);
    }
  }
}

bool mh_step_single(Rng& rng, LatentState& state, PriorKind prior, int p,
                    double delta) {
  HyperParams cand = state.hp_;
  double log_ratio = 0.0;  // proposal asymmetry + prior + likelihood delta

  auto propose_alpha = [&](double a) {
    double z = logit(a) + delta * rng.normal();
    double a2 = inv_logit(z);
    // keep strictly inside (0,1); the logit scale never reaches the edges exactly
    a2 = std::clamp(a2, 1e-12, 1.0 - 1e-9);
    return a2;
  };
  auto propose_theta = [&](double t) { return std::exp(std::log(t) + delta * rng.normal()); };

  if (p == 0) {  // alpha0
    if (prior == PriorKind::Gamma) return false;
    double a_new = propose_alpha(state.hp_.alpha0);
    cand.alpha0 = a_new;
    log_ratio += state.alpha0_block(a_new) - state.alpha0_block(state.hp_.alpha0);
    log_ratio += log_logit_normal(a_new) - log_logit_normal(state.hp_.alpha0);
    log_ratio += std::log(a_new) + std::log1p(-a_new) - std::log(state.hp_.alpha0) -
                 std::log1p(-state.hp_.alpha0);
    if (std::log(rng.uniform()) < log_ratio) {
      state.hp_.alpha0 = a_new;
      return true;
    }
    return false;
  }
  if (p == 1) {  // theta0
    double t_new = propose_theta(state.hp_.theta0);
    cand.theta0 = t_new;
    double psi_new = psi_value(state.hp_.alpha0, t_new, state.zeta0_, state.kappa_dot_);
    log_ratio += double(state.r_) * (std::log(t_new) - std::log(state.hp_.theta0));
    log_ratio += -(psi_new - state.psi0_kappa_);
    log_ratio += log_log_normal(t_new) - log_log_normal(state.hp_.theta0);
    log_ratio += std::log(t_new) - std::log(state.hp_.theta0);
    if (std::log(rng.uniform()) < log_ratio) {
      state.hp_.theta0 = t_new;
      state.psi0_kappa_ = psi_new;
      return true;
    }
    return false;
  }

  int j = (p - 2) / 2;
  bool is_alpha = (p % 2 == 0);
  if (is_alpha && prior == PriorKind::Gamma) return false;
  double gamma_j = state.counts_->sample_sizes[size_t(j)];

  double a_old = state.hp_.alpha[size_t(j)], t_old = state.hp_.theta[size_t(j)];
  double a_new = is_alpha ? propose_alpha(a_old) : a_old;
  double t_new = is_alpha ? t_old : propose_theta(t_old);

  double kappa_new_j = psi_value(a_new, t_new, state.zeta_g_, gamma_j);
  double kappa_dot_new = state.kappa_dot_ - state.kappa_[size_t(j)] + kappa_new_j;
  double psi0_new = psi_value(state.hp_.alpha0, state.hp_.theta0, state.zeta0_, kappa_dot_new);
  double coupling_new = -psi0_new - (double(state.x_dot_) - state.hp_.alpha0 * double(state.r_)) *
                                        std::log(state.zeta0_ + kappa_dot_new);
  double coupling_old = -state.psi0_kappa_ -
                        (double(state.x_dot_) - state.hp_.alpha0 * double(state.r_)) *
                            std::log(state.zeta0_ + state.kappa_dot_);
  double stir_new = 0.0;
  log_ratio += state.group_block(j, a_new, t_new, &stir_new) -
               state.group_block(j, a_old, t_old, nullptr);
  log_ratio += coupling_new - coupling_old;
  if (is_alpha) {
    log_ratio += log_logit_normal(a_new) - log_logit_normal(a_old);
    log_ratio += std::log(a_new) + std::log1p(-a_new) - std::log(a_old) - std::log1p(-a_old);
  } else {
    log_ratio += log_log_normal(t_new) - log_log_normal(t_old);
    log_ratio += std::log(t_new) - std::log(t_old);
  }
  if (std::log(rng.uniform()) < log_ratio) {
    state.hp_.alpha[size_t(j)] = a_new;
    state.hp_.theta[size_t(j)] = t_new;
    state.kappa_[size_t(j)] = kappa_new_j;
    state.kappa_dot_ = kappa_dot_new;
    state.psi0_kappa_ = psi0_new;
    state.stir_sum_[size_t(j)] = stir_new;
    if (is_alpha)
      state.tables_[size_t(j)] = std::make_unique<StirlingTable>(
          a_new, std::max<long>(1, state.group_max_n_[size_t(j)]));
    return true;
  }
  return false;
}

void mh_update_params(Rng& rng, LatentState& state, PriorKind prior,
                      const std::vector<double>& deltas, std::vector<long>* accepted) {
  int np = hyper_param_count(state.num_groups());
  if (int(deltas.size()) != np) throw std::domain_error("mh_update_params: deltas size");
  for (int p = 0; p < np; ++p) {
    if (param_is_alpha(p) && prior == PriorKind::Gamma) continue;
    bool acc = mh_step_single(rng, state, prior, p, deltas[size_t(p)]);
    if (acc && accepted) ++(*accepted)[size_t(p)];
  }
}

namespace {

HyperParams initial_params(Rng& rng, PriorKind prior, int J) {
  HyperParams hp;
  auto draw_alpha = [&]() { return inv_logit(0.75 * rng.normal()); };
  auto draw_theta = [&]() { return std::exp(0.75 * rng.normal()); };
  hp.alpha0 = prior == PriorKind::GG ? draw_alpha() : 0.0;
  hp.theta0 = draw_theta();
  for (int j = 0; j < J; ++j) {
    hp.alpha.push_back(prior == PriorKind::GG ? draw_alpha() : 0.0);
    hp.theta.push_back(draw_theta());
  }
  return hp;
}

}  // namespace

ChainSet run_chains(const CountMatrix& counts, const FitConfig& config) {
  config.validate();
  counts.validate();
  const int J = counts.num_groups();
  const int np = hyper_param_count(J);
  ChainSet out;
  out.config = config;
  out.param_names = hyper_param_names(J);
  out.chains.assign(size_t(config.chains), {});
  out.acceptance.assign(size_t(config.chains), std::vector<double>(size_t(np), 0.0));
  const long n_records = (config.steps - config.burn_in) / config.thin;

  parallel_for(config.chains, config.threads, [&](long c) {
    Rng rng = Rng(config.seed, 0x9D5AB1ull).derive(std::uint64_t(c));
    HyperParams hp = initial_params(rng, config.prior, J);
    LatentState state(counts, hp, config.zeta0, config.zeta_group);
    std::vector<double> deltas(static_cast<size_t>(np), config.delta);
    std::vector<long> proposals(static_cast<size_t>(np), 0), accepted(size_t(np), 0);
    auto& records = out.chains[size_t(c)];
    records.reserve(size_t(n_records));

    for (long step = 1; step <= config.steps; ++step) {
      gibbs_update_x(rng, state);
      for (int p = 0; p < np; ++p) {
        if (param_is_alpha(p) && config.prior == PriorKind::Gamma) continue;
        bool acc = mh_step_single(rng, state, config.prior, p, deltas[size_t(p)]);
        if (step <= config.burn_in) {
          if (config.adapt) {
            long t = ++proposals[size_t(p)];
            double rate = std::min(0.25, 2.0 / std::sqrt(double(t)));
            double ld = std::log(deltas[size_t(p)]) + rate * ((acc ? 1.0 : 0.0) - 0.44);
            deltas[size_t(p)] = std::clamp(std::exp(ld), 1e-3, 5.0);
          }
        } else {
          if (acc) ++accepted[size_t(p)];
        }
      }
      if (step % 1000 == 0) state.set_params(state.params());  // cache refresh
      if (step > config.burn_in && (step - config.burn_in) % config.thin == 0 &&
          long(records.size()) < n_records) {
        ChainRecord rec;
        rec.step = step;
        rec.params = state.params();
        rec.log_joint = state.log_joint(config.prior);
        records.push_back(std::move(rec));
      }
    }
    long post = config.steps - config.burn_in;
    for (int p = 0; p < np; ++p)
      out.acceptance[size_t(c)][size_t(p)] =
          post > 0 ? double(accepted[size_t(p)]) / double(post) : 0.0;
  });
  return out;
}

double rhat(const ChainSet& cs, int param_index) {
  if (cs.chains.size() < 2) throw std::domain_error("rhat: need >= 2 chains");
  long rec = cs.records_per_chain();
  if (rec < 4) throw std::domain_error("rhat: need >= 4 records per chain");
  long half = rec / 2;
  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& chain : cs.chains) {
    for (int part = 0; part < 2; ++part) {
      double m = 0.0;
      for (long i = 0; i < half; ++i)
        m += record_param(chain[size_t(part * half + i)], param_index);
      m /= double(half);
      double v = 0.0;
      for (long i = 0; i < half; ++i) {
        double d = record_param(chain[size_t(part * half + i)], param_index) - m;
        v += d * d;
      }
      v /= double(half - 1);
      means.push_back(m);
      vars.push_back(v);
    }
  }
  double w = std::accumulate(vars.begin(), vars.end(), 0.0) / double(vars.size());
  double grand = std::accumulate(means.begin(), means.end(), 0.0) / double(means.size());
  double b = 0.0;
  for (double m : means) b += (m - grand) * (m - grand);
  b *= double(half) / double(means.size() - 1);
  if (w == 0.0) return b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  double var_plus = (double(half - 1) / double(half)) * w + b / double(half);
  return std::sqrt(var_plus / w);
}

std::vector<double> rhat_all(const ChainSet& cs) {
  int J = int(cs.param_names.size() - 2) / 2;
  std::vector<double> out;
  for (int p = 0; p < hyper_param_count(J); ++p) {
    if (param_is_alpha(p) && cs.config.prior == PriorKind::Gamma) {
      out.push_back(1.0);  // fixed at zero under the gamma prior
      continue;
    }
    out.push_back(rhat(cs, p));
  }
  return out;
}

}  // namespace phibp
