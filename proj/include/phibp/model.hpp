#ifndef PHIBP_MODEL_HPP
#define PHIBP_MODEL_HPP

#include <vector>

#include "phibp/levy.hpp"
#include "phibp/rng.hpp"

namespace phibp {

// Full model specification: a base-level Levy density, one Levy density per
// group, and per-sample positive weights gamma[i][j] (all 1 by default).
struct ModelParams {
  LevyParams base;
  std::vector<LevyParams> groups;
  std::vector<std::vector<double>> gamma_weights;  // [group][sample]

  int num_groups() const { return int(groups.size()); }
  double gamma_total(int j) const;  // sum_i gamma[i][j]
  void validate() const;

  // Convenience: J groups with M[j] unit-weight samples each.
  static ModelParams with_unit_weights(LevyParams base, std::vector<LevyParams> groups,
                                       const std::vector<long>& samples_per_group);
};

// Latent species allocation: the realized species and their per-group block
// counts X[j][l] with totals Xtot[l] = sum_j X[j][l] >= 1.
struct AllocationDraw {
  long num_species = 0;
  std::vector<long> x_total;           // [species]
  std::vector<std::vector<long>> x;    // [group][species]
};

// A complete simulated dataset with all latent structure retained.
struct SyntheticDataset {
  ModelParams truth;
  AllocationDraw allocation;
  // otu_counts[j][l] holds the X[j][l] positive block counts summing to counts[j][l].
  std::vector<std::vector<std::vector<long>>> otu_counts;
  std::vector<std::vector<long>> counts;             // N[j][l]
  std::vector<std::vector<std::vector<long>>> per_sample;  // [group][sample][species]

  int num_groups() const { return int(counts.size()); }
  long num_species() const { return allocation.num_species; }
};

// Poisson mean of the number of realized species, Psi_0(sum_j psi_j(sum_i gamma_ij)).
double expected_phi(const ModelParams& params);

// Draws the species allocation: phi ~ Poisson(expected_phi); per species a total
// block count from MtP(tau_0, sum_j psi_j) split multinomially across groups with
// weights psi_j / sum_v psi_v.
AllocationDraw sample_allocation(Rng& rng, const ModelParams& params);

// Exact draw from the marginal of the grouped count matrix: allocation, then one
// MtP(tau_j, sum_i gamma_ij) count per OTU block, then a multinomial split of each
// group-species total across that group's samples.
SyntheticDataset simulate_dataset(Rng& rng, const ModelParams& params);

}  // namespace phibp

#endif
