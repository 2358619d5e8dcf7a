#ifndef PHIBP_DIVERSITY_HPP
#define PHIBP_DIVERSITY_HPP

#include <vector>

#include "phibp/io.hpp"
#include "phibp/posterior.hpp"

namespace phibp {

// Shannon entropy of the normalized abundance rates of group j, taken over all
// observed species including those with n = 0 in that group (whose mass is the
// retained sigma-hat part).  Natural log.
double shannon_alpha(const PosteriorAbundanceDraw& draw, int group);

// Bray-Curtis dissimilarity between two groups' abundance-rate vectors.
double bray_curtis(const PosteriorAbundanceDraw& draw, int group_a, int group_b);

// Frequency-of-frequencies: fraction of species with count k among species with
// positive count in the group.  Empty when every count is zero.
struct FoF {
  std::vector<long> support;  // strictly increasing k >= 1
  std::vector<double> mass;   // sums to 1 over the support

  bool empty() const { return support.empty(); }
};
FoF fof(const CountMatrix& counts, int group);
FoF fof_from_counts(const std::vector<long>& counts);

// Kolmogorov-Smirnov distance between two FoF distributions (sup over the union
// support of absolute CDF differences).
double ks_statistic(const FoF& a, const FoF& b);

}  // namespace phibp

#endif
