#ifndef PHIBP_PREDICT_HPP
#define PHIBP_PREDICT_HPP

#include <optional>
#include <string>
#include <vector>

#include "phibp/io.hpp"
#include "phibp/posterior.hpp"

namespace phibp {

// One previously unseen species produced by the prediction rule: its global
// rate, per-group block counts and OTU counts, and (for diversity work) the
// assembled per-group abundance rates.
struct PredictedNewSpecies {
  long x_total = 0;
  double h = 0.0;
  std::vector<long> x;                           // per group
  std::vector<std::vector<long>> otu_counts;     // per group
  std::vector<long> counts;                      // N*_{j,v}
  std::vector<double> sigma_tilde;               // per group (new-sample scale)
};

// Three-component predictive draw for m_j additional unit-weight samples per
// group: (1) completely new species, (2) new OTUs for existing species,
// (3) Poisson increments on existing OTUs.
struct PredictiveDraw {
  std::vector<double> m;            // per-group new-sample weights
  std::vector<double> kappa_star;   // psi_j(M_j + m_j) - psi_j(M_j)
  std::vector<PredictedNewSpecies> new_species;
  std::vector<std::vector<long>> comp2_blocks;                  // [group][species]
  std::vector<std::vector<std::vector<long>>> comp2_otu_counts; // [group][species][k]
  std::vector<std::vector<long>> comp2_counts;                  // sums
  std::vector<std::vector<std::vector<long>>> comp3_increments; // per existing OTU
  std::vector<std::vector<long>> comp3_counts;                  // sums

  // total predicted count for an existing species (components 2 + 3)
  long existing_total(int j, long l) const {
    return comp2_counts[size_t(j)][size_t(l)] + comp3_counts[size_t(j)][size_t(l)];
  }
};

// Prediction rule given a posterior abundance draw (which carries H_l, S_{j,k,l},
// X_{j,l}) and the training sample weights.  m_j >= 0; all-zero m yields an
// empty draw.
PredictiveDraw sample_predictive(Rng& rng, const PosteriorAbundanceDraw& post,
                                 const std::vector<double>& gamma_totals,
                                 const std::vector<double>& m_new);

// Adding one new group with its own Levy parameters and total weight gamma_new:
// only the new-species and new-OTU components exist.
struct NewGroupDraw {
  double kappa_new = 0.0;
  long num_new_species = 0;
  std::vector<long> new_species_counts;       // per new species, in the new group
  std::vector<long> new_species_blocks;       // X*_{J+1,v}
  std::vector<double> new_species_h;
  std::vector<long> existing_blocks;          // P*_{J+1,l} per existing species
  std::vector<long> existing_counts;
};
NewGroupDraw sample_new_group(Rng& rng, const PosteriorAbundanceDraw& post,
                              const std::vector<double>& gamma_totals,
                              const LevyParams& new_group, double gamma_new);

// Shannon entropy of the normalized abundance rates of the completely new
// species appearing in the next batch of m_j samples; one draw per group.
// Returns NaN for a group when no new species arrive (empty simplex).
std::vector<double> unseen_entropy(Rng& rng, const PosteriorAbundanceDraw& post,
                                   const std::vector<double>& gamma_totals,
                                   const std::vector<double>& m_new);

// Test matrix aligned to a training matrix: per-group counts for the training
// species (by column id) plus a block of novel species (columns absent from
// training, or all-zero there).
struct AlignedTest {
  std::vector<std::vector<long>> existing;  // [group][train species]
  std::vector<std::vector<long>> novel;     // [group][novel species]
  std::vector<std::string> novel_ids;
};
AlignedTest align_test_matrix(const CountMatrix& train, const CountMatrix& test);

struct PredictiveLoglik {
  double novel = 0.0;
  double existing = 0.0;
  double total() const { return novel + existing; }
};

// Predictive log-likelihood of the aligned test counts given training counts,
// latent block counts x_latent, and hyperparameters.  The per-species latent
// sums are marginalized exactly: an auxiliary lambda restores a per-group
// product form, and the lambda integral is evaluated by fixed-node generalized
// Gauss-Laguerre quadrature (the integrand is polynomial in lambda, so node
// counts beyond half the largest test count are exact).
PredictiveLoglik predictive_loglik(const CountMatrix& train,
                                   const std::vector<std::vector<long>>& x_latent,
                                   const HyperParams& hp, double zeta0,
                                   double zeta_group, const AlignedTest& test,
                                   const std::vector<double>& m_new,
                                   int quad_nodes = 64);

}  // namespace phibp

#endif
