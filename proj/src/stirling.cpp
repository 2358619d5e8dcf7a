#include "phibp/stirling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phibp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

StirlingTable::StirlingTable(double alpha, int max_n) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::domain_error("StirlingTable: alpha must lie in [0,1)");
  if (max_n < 1) throw std::domain_error("StirlingTable: max_n must be >= 1");
  rows_.resize(1);
  rows_[0] = {0.0};  // S(1,1) = 1
  frontier_ = rows_[0];
  built_n_ = 1;
  ensure(max_n);
}

void StirlingTable::ensure(int n) {
  if (n <= built_n_) {
    if (n >= 1 && rows_[size_t(n - 1)].empty()) {
      // A previously dropped sparse row is needed again: march a fresh frontier
      // up from row 1 and capture just that row.
      std::vector<double> cur{0.0}, nxt;
      for (int m = 1; m < n; ++m) {
        nxt.assign(size_t(m + 1), kNegInf);
        for (int k = 1; k <= m; ++k) {
          double carry = std::log(m - k * alpha_) + cur[size_t(k - 1)];
          double shift = (k >= 2) ? cur[size_t(k - 2)] : kNegInf;
          nxt[size_t(k - 1)] = log_add(carry, shift);
        }
        nxt[size_t(m)] = 0.0;
        cur.swap(nxt);
      }
      rows_[size_t(n - 1)] = cur;
    }
    return;
  }
  rows_.resize(size_t(n));
  std::vector<double> next;
  while (built_n_ < n) {
    const int m = built_n_;  // extend row m -> m+1
    next.assign(size_t(m + 1), kNegInf);
    for (int k = 1; k <= m; ++k) {
      double carry = std::log(m - k * alpha_) + frontier_[size_t(k - 1)];
      double shift = (k >= 2) ? frontier_[size_t(k - 2)] : kNegInf;
      next[size_t(k - 1)] = log_add(carry, shift);
    }
    next[size_t(m)] = 0.0;  // S(n,n) = 1
    frontier_.swap(next);
    ++built_n_;
    if (built_n_ <= kDenseLimit || built_n_ == n)
      rows_[size_t(built_n_ - 1)] = frontier_;
  }
}

bool StirlingTable::has_row(int n) const {
  return n >= 1 && n <= built_n_ && !rows_[size_t(n - 1)].empty();
}

std::span<const double> StirlingTable::row(int n) const {
  if (!has_row(n)) throw std::out_of_range("StirlingTable::row: row not built");
  return std::span<const double>(rows_[size_t(n - 1)]);
}

double StirlingTable::log_s(int n, int k) const {
  if (k < 1 || k > n) throw std::out_of_range("StirlingTable::log_s: need 1 <= k <= n");
  return row(n)[size_t(k - 1)];
}

double StirlingTable::log_s_single(double alpha, int n, int k) {
  std::vector<std::pair<int, int>> pairs{{n, k}};
  return log_s_batch(alpha, pairs)[0];
}

std::vector<double> StirlingTable::log_s_batch(
    double alpha, const std::vector<std::pair<int, int>>& pairs) {
  int n_max = 0, k_max = 0;
  for (auto [n, k] : pairs) {
    if (k < 1 || k > n) throw std::out_of_range("log_s_batch: need 1 <= k <= n");
    n_max = std::max(n_max, n);
    k_max = std::max(k_max, k);
  }
  std::vector<double> out(pairs.size());
  if (n_max == 0) return out;

  // col[k-1][n-1] = ln S_alpha(n,k), filled column by column:
  //   S(n,k) = (n-1 - k*alpha) S(n-1,k) + S(n-1,k-1).
  std::vector<std::vector<double>> col(static_cast<size_t>(k_max), std::vector<double>(size_t(n_max), kNegInf));
  for (int n = 1; n <= n_max; ++n)
    col[0][size_t(n - 1)] = std::lgamma(n - alpha) - std::lgamma(1.0 - alpha);
  for (int k = 2; k <= k_max; ++k) {
    col[size_t(k - 1)][size_t(k - 1)] = 0.0;  // S(k,k) = 1
    for (int n = k + 1; n <= n_max; ++n) {
      double carry = std::log((n - 1) - k * alpha) + col[size_t(k - 1)][size_t(n - 2)];
      col[size_t(k - 1)][size_t(n - 1)] = log_add(carry, col[size_t(k - 2)][size_t(n - 2)]);
    }
  }
  for (size_t i = 0; i < pairs.size(); ++i)
    out[i] = col[size_t(pairs[i].second - 1)][size_t(pairs[i].first - 1)];
  return out;
}

double xi_partition_weight(const LevyParams& p, const StirlingTable& table, int n,
                           int x, double gamma_total) {
  p.validate();
  if (!(gamma_total > 0.0))
    throw std::domain_error("xi_partition_weight: gamma_total must be > 0");
  if (x > n || x < 0 || n < 0)
    throw std::domain_error("xi_partition_weight: need 0 <= x <= n");
  if (n == 0) return 0.0;  // Xi^{[0]} = 1
  if (x == 0) return kNegInf;
  return x * std::log(p.theta) + table.log_s(n, x) +
         (p.alpha * x - n) * std::log(gamma_total + p.zeta);
}

}  // namespace phibp
