#include "phibp/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace phibp {

double shannon_alpha(const PosteriorAbundanceDraw& draw, int group) {
  if (group < 0 || group >= draw.num_groups())
    throw std::domain_error("shannon_alpha: group out of range");
  const auto& cells = draw.cells[size_t(group)];
  double total = 0.0;
  for (const auto& c : cells) total += c.sigma_tilde;
  if (!(total > 0.0)) throw std::domain_error("shannon_alpha: no positive rates");
  double ent = 0.0;
  for (const auto& c : cells) {
    double w = c.sigma_tilde / total;
    if (w > 0.0) ent -= w * std::log(w);
  }
  return ent;
}

double bray_curtis(const PosteriorAbundanceDraw& draw, int group_a, int group_b) {
  if (group_a == group_b) throw std::domain_error("bray_curtis: groups must differ");
  if (group_a < 0 || group_b < 0 || group_a >= draw.num_groups() ||
      group_b >= draw.num_groups())
    throw std::domain_error("bray_curtis: group out of range");
  const auto& a = draw.cells[size_t(group_a)];
  const auto& b = draw.cells[size_t(group_b)];
  double num = 0.0, den = 0.0;
  for (size_t l = 0; l < a.size(); ++l) {
    num += std::fabs(a[l].sigma_tilde - b[l].sigma_tilde);
    den += a[l].sigma_tilde + b[l].sigma_tilde;
  }
  return den > 0.0 ? num / den : 0.0;
}

FoF fof_from_counts(const std::vector<long>& counts) {
  std::map<long, long> tally;
  long positive = 0;
  for (long c : counts) {
    if (c >= 1) {
      ++tally[c];
      ++positive;
    }
  }
  FoF out;
  for (auto [k, cnt] : tally) {
    out.support.push_back(k);
    out.mass.push_back(double(cnt) / double(positive));
  }
  return out;
}

FoF fof(const CountMatrix& counts, int group) {
  if (group < 0 || group >= counts.num_groups())
    throw std::domain_error("fof: group out of range");
  return fof_from_counts(counts.values[size_t(group)]);
}

double ks_statistic(const FoF& a, const FoF& b) {
  if (a.empty() || b.empty()) throw std::domain_error("ks_statistic: empty FoF");
  size_t ia = 0, ib = 0;
  double ca = 0.0, cb = 0.0, best = 0.0;
  while (ia < a.support.size() || ib < b.support.size()) {
    long ka = ia < a.support.size() ? a.support[ia] : std::numeric_limits<long>::max();
    long kb = ib < b.support.size() ? b.support[ib] : std::numeric_limits<long>::max();
    long k = std::min(ka, kb);
    if (ka == k) ca += a.mass[ia++];
    if (kb == k) cb += b.mass[ib++];
    best = std::max(best, std::fabs(ca - cb));
  }
  return best;
}

}  // namespace phibp
