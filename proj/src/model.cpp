#include "phibp/model.hpp"

#include <numeric>
#include <stdexcept>

namespace phibp {

double ModelParams::gamma_total(int j) const {
  const auto& g = gamma_weights.at(size_t(j));
  return std::accumulate(g.begin(), g.end(), 0.0);
}

void ModelParams::validate() const {
  base.validate();
  if (groups.empty()) throw std::domain_error("ModelParams: need at least one group");
  if (gamma_weights.size() != groups.size())
    throw std::domain_error("ModelParams: gamma_weights/groups size mismatch");
  for (size_t j = 0; j < groups.size(); ++j) {
    groups[j].validate();
    if (gamma_weights[j].empty())
      throw std::domain_error("ModelParams: every group needs at least one sample");
    for (double g : gamma_weights[j])
      if (!(g > 0.0)) throw std::domain_error("ModelParams: sample weights must be > 0");
  }
}

ModelParams ModelParams::with_unit_weights(LevyParams base, std::vector<LevyParams> groups,
                                           const std::vector<long>& samples_per_group) {
  if (samples_per_group.size() != groups.size())
    throw std::domain_error("with_unit_weights: size mismatch");
  ModelParams p;
  p.base = base;
  p.groups = std::move(groups);
  p.gamma_weights.resize(p.groups.size());
  for (size_t j = 0; j < p.groups.size(); ++j) {
    if (samples_per_group[j] < 1)
      throw std::domain_error("with_unit_weights: samples_per_group must be >= 1");
    p.gamma_weights[j].assign(size_t(samples_per_group[j]), 1.0);
  }
  return p;
}

double expected_phi(const ModelParams& params) {
  params.validate();
  double kappa_tot = 0.0;
  for (int j = 0; j < params.num_groups(); ++j)
    kappa_tot += laplace_exponent(params.groups[size_t(j)], params.gamma_total(j));
  return laplace_exponent(params.base, kappa_tot);
}

AllocationDraw sample_allocation(Rng& rng, const ModelParams& params) {
  params.validate();
  const int J = params.num_groups();
  std::vector<double> kappa(static_cast<size_t>(J));
  double kappa_tot = 0.0;
  for (int j = 0; j < J; ++j) {
    kappa[size_t(j)] = laplace_exponent(params.groups[size_t(j)], params.gamma_total(j));
    kappa_tot += kappa[size_t(j)];
  }
  AllocationDraw out;
  out.num_species = rng.poisson(laplace_exponent(params.base, kappa_tot));
  out.x.assign(size_t(J), std::vector<long>(size_t(out.num_species), 0));
  out.x_total.resize(size_t(out.num_species));
  std::vector<double> q(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) q[size_t(j)] = kappa[size_t(j)] / kappa_tot;
  // renormalize exactly for the multinomial contract
  double qs = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= qs;
  for (long l = 0; l < out.num_species; ++l) {
    long xt = rng.mtp(params.base, kappa_tot);
    out.x_total[size_t(l)] = xt;
    auto split = rng.multinomial(xt, q);
    for (int j = 0; j < J; ++j) out.x[size_t(j)][size_t(l)] = split[size_t(j)];
  }
  return out;
}

SyntheticDataset simulate_dataset(Rng& rng, const ModelParams& params) {
  SyntheticDataset ds;
  ds.truth = params;
  ds.allocation = sample_allocation(rng, params);
  const int J = params.num_groups();
  const long r = ds.allocation.num_species;
  ds.otu_counts.assign(size_t(J), {});
  ds.counts.assign(size_t(J), std::vector<long>(size_t(r), 0));
  ds.per_sample.assign(size_t(J), {});
  for (int j = 0; j < J; ++j) {
    const auto& gw = params.gamma_weights[size_t(j)];
    const double gtot = params.gamma_total(j);
    std::vector<double> w(gw.size());
    for (size_t i = 0; i < gw.size(); ++i) w[i] = gw[i] / gtot;
    double ws = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= ws;
    ds.otu_counts[size_t(j)].resize(size_t(r));
    ds.per_sample[size_t(j)].assign(gw.size(), std::vector<long>(size_t(r), 0));
    for (long l = 0; l < r; ++l) {
      long blocks = ds.allocation.x[size_t(j)][size_t(l)];
      auto& otus = ds.otu_counts[size_t(j)][size_t(l)];
      otus.resize(size_t(blocks));
      long n = 0;
      for (long k = 0; k < blocks; ++k) {
        otus[size_t(k)] = rng.mtp(params.groups[size_t(j)], gtot);
        n += otus[size_t(k)];
      }
      ds.counts[size_t(j)][size_t(l)] = n;
      auto split = rng.multinomial(n, w);
      for (size_t i = 0; i < gw.size(); ++i)
        ds.per_sample[size_t(j)][i][size_t(l)] = split[i];
    }
  }
  return ds;
}

}  // namespace phibp
