#ifndef PHIBP_REPORT_HPP
#define PHIBP_REPORT_HPP

#include <string>

#include "phibp/inference.hpp"
#include "phibp/posterior.hpp"

namespace phibp {

// Chain records as CSV: step,chain,<param names...>,log_joint.
std::string chains_to_csv(const ChainSet& cs);
void save_chains_csv(const ChainSet& cs, const std::string& path);

// Reload chain records written by chains_to_csv (hyperparameter values and
// layout only; acceptance diagnostics are not round-tripped).
ChainSet load_chains_csv(const std::string& path);

// Rhat per parameter plus per-chain acceptance rates, as JSON.
std::string diagnostics_json(const ChainSet& cs);

// Posterior abundance draws as CSV rows: draw,group,species,h,sigma_tilde,x,n.
std::string abundance_to_csv(const std::vector<PosteriorAbundanceDraw>& draws,
                             const CountMatrix& counts);

}  // namespace phibp

#endif
