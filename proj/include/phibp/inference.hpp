#ifndef PHIBP_INFERENCE_HPP
#define PHIBP_INFERENCE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "phibp/io.hpp"
#include "phibp/rng.hpp"
#include "phibp/stirling.hpp"

namespace phibp {

enum class PriorKind { GG, Gamma };

struct HyperParams {
  double alpha0 = 0.5;
  double theta0 = 1.0;
  std::vector<double> alpha;  // per group
  std::vector<double> theta;  // per group
};

struct FitConfig {
  PriorKind prior = PriorKind::GG;
  int chains = 3;
  long steps = 10000;
  long burn_in = 5000;
  long thin = 10;
  double delta = 0.1;   // proposal scale (per parameter, Robbins-Monro adapted)
  bool adapt = true;    // adaptation runs during burn-in only, target 0.44
  double zeta0 = 1.0;   // fixed (not inferred)
  double zeta_group = 1.0;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: PHIBP_THREADS or hardware_concurrency

  void validate() const;
};

// MCMC state for one chain: latent block counts X[j][l], current hyperparameters,
// and the caches (kappa_j, kappa_., Psi_0(kappa_.), per-species x_l, x_., per-group
// Stirling sums) that the Gibbs and Metropolis kernels update incrementally.
class LatentState {
 public:
  LatentState(const CountMatrix& counts, HyperParams init, double zeta0,
              double zeta_group);

  const CountMatrix& counts() const { return *counts_; }
  const HyperParams& params() const { return hp_; }
  int num_groups() const { return J_; }
  long num_species() const { return r_; }

  long x(int j, long l) const { return x_[size_t(j)][size_t(l)]; }
  long x_species_total(long l) const { return x_l_[size_t(l)]; }
  long x_grand_total() const { return x_dot_; }
  double kappa(int j) const { return kappa_[size_t(j)]; }
  double kappa_total() const { return kappa_dot_; }

  void set_x(int j, long l, long value);          // maintains caches
  void set_params(const HyperParams& hp);         // rebuilds caches and tables

  const StirlingTable& table(int j) const { return *tables_[size_t(j)]; }

  // Log of the joint probability of (phi = r, counts, X) under the current
  // hyperparameters, every count-dependent constant included.
  double log_likelihood() const;
  // Same quantity recomputed from scratch, ignoring the caches (test hook).
  double log_likelihood_fresh() const;
  double log_prior(PriorKind prior) const;
  double log_joint(PriorKind prior) const { return log_likelihood() + log_prior(prior); }

  void check_cache_integrity(double tol = 1e-10) const;  // throws on drift

  // Gibbs conditional log-weights for X[j][l] = 1..n (unnormalized).
  std::vector<double> gibbs_log_weights(int j, long l) const;

 private:
  friend void gibbs_update_x(Rng&, LatentState&);
  friend bool mh_step_single(Rng&, LatentState&, PriorKind, int, double);

  void rebuild_caches();
  double alpha0_block(double alpha0) const;  // alpha0-dependent part of log lik
  double group_block(int j, double alpha_j, double theta_j,
                     double* stir_sum_out) const;

  const CountMatrix* counts_;
  int J_;
  long r_;
  HyperParams hp_;
  double zeta0_, zeta_g_;

  std::vector<std::vector<long>> x_;  // [group][species]
  std::vector<long> x_l_;             // per-species totals
  long x_dot_ = 0;

  std::vector<double> kappa_;  // psi_j(sum_i gamma_ij)
  double kappa_dot_ = 0.0;
  double psi0_kappa_ = 0.0;

  std::vector<double> stir_sum_;   // per group: sum_l ln S_alpha_j(n_jl, x_jl)
  std::vector<double> lgam_const_; // per group: sum_{l: n>0} [n ln(sum gamma) - ln n!]
  std::vector<long> sum_x_group_;  // per group: sum_l x_jl
  std::vector<long> group_max_n_;
  std::vector<std::unique_ptr<StirlingTable>> tables_;
  std::vector<std::vector<long>> cells_;  // per group: species with n > 0
};

// One systematic-scan Gibbs sweep over all cells with n > 0; exact draws from
// the stated discrete conditional.
void gibbs_update_x(Rng& rng, LatentState& state);

// One Metropolis-within-Gibbs proposal for parameter index p (0 = alpha0,
// 1 = theta0, 2+2j = alpha_j, 3+2j = theta_j).  Returns acceptance.  Logit /
// log random-walk proposals with the change-of-variable asymmetry correction.
bool mh_step_single(Rng& rng, LatentState& state, PriorKind prior, int param_index,
                    double delta);

// One full MH sweep (skips alpha parameters under the gamma prior).
// deltas has one scale per parameter; accepted[i] incremented on acceptance.
void mh_update_params(Rng& rng, LatentState& state, PriorKind prior,
                      const std::vector<double>& deltas, std::vector<long>* accepted);

int hyper_param_count(int num_groups);
std::vector<std::string> hyper_param_names(int num_groups);
bool param_is_alpha(int param_index);

struct ChainRecord {
  long step = 0;
  HyperParams params;
  double log_joint = 0.0;
};

struct ChainSet {
  FitConfig config;
  std::vector<std::string> param_names;
  std::vector<std::vector<ChainRecord>> chains;
  std::vector<std::vector<double>> acceptance;  // [chain][param], post burn-in

  long records_per_chain() const {
    return chains.empty() ? 0 : long(chains.front().size());
  }
};

// Runs config.chains independent chains with independent streams, alternating a
// full Gibbs sweep with an MH sweep each step, recording thinned post-burn-in
// hyperparameter states.
ChainSet run_chains(const CountMatrix& counts, const FitConfig& config);

// Split-Rhat for one parameter (by flat index into the record vector order).
// Requires >= 2 chains and >= 4 records per chain.
double rhat(const ChainSet& cs, int param_index);
std::vector<double> rhat_all(const ChainSet& cs);

// Flat view of a parameter from a record (same indexing as hyper_param_names).
double record_param(const ChainRecord& rec, int param_index);

}  // namespace phibp

#endif
