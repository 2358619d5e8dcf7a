#ifndef PHIBP_STIRLING_HPP
#define PHIBP_STIRLING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "phibp/levy.hpp"

namespace phibp {

// Triangular table of ln S_alpha(n,k), the generalized Stirling numbers of the
// first kind, built by the recurrence
//   S_alpha(n+1,k) = (n - k*alpha) S_alpha(n,k) + S_alpha(n,k-1),  S_alpha(1,1) = 1,
// entirely in log space (S_alpha(n,1) ~ Gamma(n-alpha) overflows doubles near
// n = 170).  alpha == 0 reproduces the unsigned Stirling numbers of the first kind.
//
// Rows grow lazily up to the largest requested n.  Rows with n <= kDenseLimit are
// all retained; larger rows are kept only for the n values actually requested,
// which keeps memory linear for heavy-tailed count data.  Immutable lookups are
// safe to share across threads once the needed rows exist.
class StirlingTable {
 public:
  explicit StirlingTable(double alpha, int max_n = 1);

  double alpha() const { return alpha_; }
  int max_n() const { return built_n_; }

  // Ensures rows up to n exist (row n itself always retained).
  void ensure(int n);

  // ln S_alpha(n,k); requires 1 <= k <= n <= max_n() and row n retained.
  double log_s(int n, int k) const;

  // Row of ln S_alpha(n, .) indexed k = 1..n (element [k-1]).
  std::span<const double> row(int n) const;

  bool has_row(int n) const;

  // ln S_alpha(n,k) for a single pair without building the full triangle:
  // column-wise recursion, O(n*k) time, O(n) memory.  Used for Metropolis
  // candidate evaluation where alpha differs from any built table.
  static double log_s_single(double alpha, int n, int k);

  // Batch version sharing the column sweep across pairs; pairs are (n,k).
  static std::vector<double> log_s_batch(double alpha,
                                         const std::vector<std::pair<int, int>>& pairs);

 private:
  static constexpr int kDenseLimit = 4096;

  double alpha_;
  int built_n_ = 0;
  std::vector<std::vector<double>> rows_;  // rows_[n-1] = row n (may be empty if dropped)
  std::vector<double> frontier_;           // last built row, kept for extension
};

// ln Xi^{[n]}_x(tau, gamma) = x ln theta + ln S_alpha(n,x) + (alpha x - n) ln(gamma + zeta),
// the x-block partition weight of the finite Gibbs partition induced by tau with
// total exposure gamma.  n = x = 0 returns 0 (empty-product convention).
double xi_partition_weight(const LevyParams& p, const StirlingTable& table, int n,
                           int x, double gamma_total);

}  // namespace phibp

#endif
