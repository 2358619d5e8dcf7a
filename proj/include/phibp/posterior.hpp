#ifndef PHIBP_POSTERIOR_HPP
#define PHIBP_POSTERIOR_HPP

#include <utility>
#include <vector>

#include "phibp/inference.hpp"
#include "phibp/io.hpp"
#include "phibp/rng.hpp"
#include "phibp/stirling.hpp"

namespace phibp {

// Posterior abundance state for one (group, species) cell.  sigma_tilde is
// stored as sigma_hat + sum(otu_rates) exactly; for cells with n = 0 the OTU
// lists are empty and the whole rate is the retained sigma_hat mass (a
// "sampling zero" keeps positive abundance).
struct AbundanceCell {
  long n = 0;
  long x = 0;
  std::vector<long> otu_counts;   // x entries summing to n
  std::vector<double> otu_rates;  // S_{j,k,l}
  double sigma_hat = 0.0;
  double sigma_tilde = 0.0;
};

struct PosteriorAbundanceDraw {
  HyperParams params;
  double zeta0 = 1.0, zeta_group = 1.0;
  double kappa_total = 0.0;
  std::vector<double> h;                          // per species global rate
  std::vector<std::vector<AbundanceCell>> cells;  // [group][species]

  int num_groups() const { return int(cells.size()); }
  long num_species() const { return long(h.size()); }
};

// Block count X | n, h:  P(x) proportional to h^x Xi^{[n]}_x(tau_j, gamma_total).
long sample_block_count(Rng& rng, const LevyParams& pj, const StirlingTable& table,
                        long n, double h, double gamma_total);

// Ordered OTU composition (c_1..c_x) summing to n by sequential first-part draws:
// P(c_1 = c | n, x) = [Gamma(c-a)/(Gamma(1-a) c!)] W(n-c, x-1) / W(n, x) with
// W(n,x) = x! S_a(n,x) / n!.
std::vector<long> sample_composition(Rng& rng, const LevyParams& pj,
                                     const StirlingTable& table, long n, long x);

// Both stages; n = 0 yields (0, {}).
std::pair<long, std::vector<long>> sample_latent_given_counts(
    Rng& rng, const LevyParams& pj, const StirlingTable& table, long n, double h,
    double gamma_total);

// Global rate H | x_l:  Gamma(x_l - alpha0, zeta0 + kappa_total).
double sample_h(Rng& rng, long x_species_total, const LevyParams& base,
                double kappa_total);

// Abundance split for one cell given its OTU counts and global rate h:
//   gamma case:  sigma_hat ~ Gamma(theta h, R), S_k ~ Gamma(c_k, R)
//   GG case:     R sigma_hat ~ T_alpha((theta/alpha) R^alpha h),  S_k ~ Gamma(c_k - alpha, R)
// with R = gamma_total + zeta.
AbundanceCell sample_abundance(Rng& rng, const LevyParams& pj, double gamma_total,
                               long n, std::vector<long> otu_counts, double h);

// One joint posterior draw of (X, H, compositions, abundance rates) given counts
// and hyperparameters, by alternating the exact conditionals H | X and X | n, H
// for aug_sweeps rounds.
PosteriorAbundanceDraw sample_posterior_draw(Rng& rng, const CountMatrix& counts,
                                             const HyperParams& hp, double zeta0,
                                             double zeta_group, int aug_sweeps = 20);

// Top jumps of the unobserved-species CRM with tilted Levy density
// e^{-lambda kappa_total} tau_0(lambda), generated largest-first by inverse-Levy
// (Ferguson-Klass), truncated at `budget` atoms or when jumps fall below floor.
// Diagnostics only; the exact marginal machinery never truncates.
struct UnseenAtom {
  double lambda = 0.0;               // global rate of the unseen species
  std::vector<double> group_rates;   // sigma-hat style per-group rates
};
std::vector<UnseenAtom> sample_unseen_base(Rng& rng, const HyperParams& hp,
                                           double zeta0, double zeta_group,
                                           const std::vector<double>& gamma_totals,
                                           long budget, double floor = 0.0);

}  // namespace phibp

#endif
