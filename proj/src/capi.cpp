#include "phibp.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "phibp/diversity.hpp"
#include "phibp/inference.hpp"
#include "phibp/io.hpp"
#include "phibp/model.hpp"
#include "phibp/parallel.hpp"
#include "phibp/posterior.hpp"
#include "phibp/predict.hpp"
#include "phibp/report.hpp"

using nlohmann::json;

struct phibp_counts {
  phibp::CountMatrix cm;
};
struct phibp_chains {
  phibp::ChainSet cs;
};
struct phibp_draws {
  std::vector<phibp::PosteriorAbundanceDraw> draws;
};

namespace {

thread_local std::string g_last_error;

phibp_status fail(phibp_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
phibp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::domain_error& e) {
    return fail(PHIBP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PHIBP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(PHIBP_ERR_RUNTIME, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

phibp::FitConfig fit_config_from_json(const std::string& text) {
  json j = json::parse(text);
  phibp::FitConfig cfg;
  std::string prior = j.value("prior", "gg");
  if (prior == "gg")
    cfg.prior = phibp::PriorKind::GG;
  else if (prior == "gamma")
    cfg.prior = phibp::PriorKind::Gamma;
  else
    throw std::domain_error("fit config: prior must be 'gg' or 'gamma'");
  cfg.chains = j.value("chains", 3);
  cfg.steps = j.value("steps", 10000L);
  cfg.burn_in = j.value("burnin", cfg.steps / 2);
  cfg.thin = j.value("thin", 10L);
  cfg.delta = j.value("delta", 0.1);
  cfg.adapt = j.value("adapt", true);
  cfg.zeta0 = j.value("zeta0", 1.0);
  cfg.zeta_group = j.value("zeta", 1.0);
  cfg.threads = j.value("threads", 0);
  cfg.validate();
  return cfg;
}

std::vector<phibp::PosteriorAbundanceDraw> posterior_draws_impl(
    const phibp::CountMatrix& cm, const phibp::ChainSet& cs, long max_draws,
    int aug_sweeps, int threads, uint64_t seed) {
  std::vector<const phibp::ChainRecord*> records;
  for (const auto& chain : cs.chains)
    for (const auto& rec : chain) records.push_back(&rec);
  if (records.empty()) throw std::runtime_error("posterior: no chain records");
  long stride = 1;
  if (max_draws > 0 && long(records.size()) > max_draws)
    stride = (long(records.size()) + max_draws - 1) / max_draws;
  std::vector<const phibp::ChainRecord*> used;
  for (size_t i = 0; i < records.size(); i += size_t(stride)) used.push_back(records[i]);

  double zeta0 = cs.config.zeta0 > 0 ? cs.config.zeta0 : 1.0;
  double zetag = cs.config.zeta_group > 0 ? cs.config.zeta_group : 1.0;
  std::vector<phibp::PosteriorAbundanceDraw> draws(used.size());
  phibp::parallel_for(long(used.size()), threads, [&](long i) {
    phibp::Rng rng = phibp::Rng(seed, 0xAB5EED).derive(std::uint64_t(i));
    draws[size_t(i)] = phibp::sample_posterior_draw(rng, cm, used[size_t(i)]->params,
                                                    zeta0, zetag, aug_sweeps);
  });
  return draws;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

extern "C" {

const char* phibp_version(void) { return "0.1.0"; }

const char* phibp_last_error(void) { return g_last_error.c_str(); }

void phibp_string_free(char* s) { delete[] s; }

phibp_status phibp_counts_load(const char* path, const char* sample_sizes_path,
                               int keep_zero_columns, phibp_counts** out) {
  if (!path || !out) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::LoadOptions opts;
    opts.drop_zero_columns = keep_zero_columns == 0;
    if (sample_sizes_path) opts.sample_sizes_path = sample_sizes_path;
    auto cm = phibp::load_count_matrix(path, opts);
    *out = new phibp_counts{std::move(cm)};
    return PHIBP_OK;
  });
}

phibp_status phibp_counts_save(const phibp_counts* cm, const char* path) {
  if (!cm || !path) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::save_count_matrix(cm->cm, path);
    return PHIBP_OK;
  });
}

phibp_status phibp_counts_save_sample_sizes(const phibp_counts* cm, const char* path) {
  if (!cm || !path) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::save_sample_sizes(cm->cm, path);
    return PHIBP_OK;
  });
}

void phibp_counts_free(phibp_counts* cm) { delete cm; }

int64_t phibp_counts_num_groups(const phibp_counts* cm) {
  return cm ? cm->cm.num_groups() : -1;
}

int64_t phibp_counts_num_species(const phibp_counts* cm) {
  return cm ? cm->cm.num_species() : -1;
}

int64_t phibp_counts_cell(const phibp_counts* cm, int64_t group, int64_t species) {
  if (!cm || group < 0 || group >= cm->cm.num_groups() || species < 0 ||
      species >= cm->cm.num_species())
    return -1;
  return cm->cm.at(int(group), species);
}

phibp_status phibp_counts_set_sample_size(phibp_counts* cm, int64_t group, double m) {
  if (!cm || group < 0 || group >= cm->cm.num_groups() || !(m > 0))
    return fail(PHIBP_ERR_INVALID_ARGUMENT, "bad group index or sample size");
  cm->cm.sample_sizes[size_t(group)] = m;
  return PHIBP_OK;
}

phibp_status phibp_simulate(const char* config_json, uint64_t seed,
                            phibp_counts** counts_out, char** latents_json_out) {
  if (!config_json || !counts_out)
    return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto params = phibp::model_params_from_json(config_json);
    phibp::Rng rng(seed, 0x51D0);
    auto ds = phibp::simulate_dataset(rng, params);
    auto cm = phibp::counts_from_dataset(ds);
    if (latents_json_out) *latents_json_out = dup_string(phibp::dataset_latents_to_json(ds));
    *counts_out = new phibp_counts{std::move(cm)};
    return PHIBP_OK;
  });
}

phibp_status phibp_split(const phibp_counts* cm, const double* m_new, int64_t m_len,
                         uint64_t seed, phibp_counts** train_out,
                         phibp_counts** test_out) {
  if (!cm || !m_new || !train_out || !test_out)
    return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<double> m(m_new, m_new + m_len);
    phibp::Rng rng(seed, 0x5917);
    auto [train, test] = phibp::binomial_split(rng, cm->cm, m);
    *train_out = new phibp_counts{std::move(train)};
    *test_out = new phibp_counts{std::move(test)};
    return PHIBP_OK;
  });
}

phibp_status phibp_fit(const phibp_counts* cm, const char* config_json, uint64_t seed,
                       phibp_chains** out) {
  if (!cm || !config_json || !out) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto cfg = fit_config_from_json(config_json);
    cfg.seed = seed;
    phibp::CountMatrix counts = cm->cm;
    counts.drop_zero_columns();
    auto cs = phibp::run_chains(counts, cfg);
    *out = new phibp_chains{std::move(cs)};
    return PHIBP_OK;
  });
}

phibp_status phibp_chains_save_csv(const phibp_chains* cs, const char* path) {
  if (!cs || !path) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::save_chains_csv(cs->cs, path);
    return PHIBP_OK;
  });
}

phibp_status phibp_chains_load_csv(const char* path, phibp_chains** out) {
  if (!path || !out) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new phibp_chains{phibp::load_chains_csv(path)};
    return PHIBP_OK;
  });
}

phibp_status phibp_chains_diagnostics_json(const phibp_chains* cs, char** json_out) {
  if (!cs || !json_out) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *json_out = dup_string(phibp::diagnostics_json(cs->cs));
    return PHIBP_OK;
  });
}

void phibp_chains_free(phibp_chains* cs) { delete cs; }

phibp_status phibp_posterior(const phibp_counts* cm, const phibp_chains* cs,
                             const char* config_json, uint64_t seed,
                             phibp_draws** out) {
  if (!cm || !cs || !out) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    long max_draws = 0;
    int aug_sweeps = 20, threads = 0;
    if (config_json) {
      json j = json::parse(config_json);
      max_draws = j.value("max_draws", 0L);
      aug_sweeps = j.value("aug_sweeps", 20);
      threads = j.value("threads", 0);
    }
    phibp::CountMatrix counts = cm->cm;
    counts.drop_zero_columns();
    auto draws = posterior_draws_impl(counts, cs->cs, max_draws, aug_sweeps, threads, seed);
    *out = new phibp_draws{std::move(draws)};
    return PHIBP_OK;
  });
}

phibp_status phibp_draws_save_csv(const phibp_draws* draws, const phibp_counts* cm,
                                  const char* path) {
  if (!draws || !cm || !path) return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::CountMatrix counts = cm->cm;
    counts.drop_zero_columns();
    write_file(path, phibp::abundance_to_csv(draws->draws, counts));
    return PHIBP_OK;
  });
}

void phibp_draws_free(phibp_draws* draws) { delete draws; }

phibp_status phibp_predict_csv(const phibp_counts* cm, const phibp_draws* draws,
                               const double* m_new, int64_t m_len, uint64_t seed,
                               const char* draws_csv_path,
                               const char* entropy_csv_path) {
  if (!cm || !draws || !m_new || !draws_csv_path || !entropy_csv_path)
    return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::CountMatrix counts = cm->cm;
    counts.drop_zero_columns();
    std::vector<double> m(m_new, m_new + m_len);
    if (int64_t(counts.num_groups()) != m_len)
      throw std::domain_error("predict: m has wrong length");
    std::ostringstream main_csv, ent_csv;
    main_csv << "draw,group,new_species,comp1_count,comp2_count,comp3_count\n";
    ent_csv << "draw,group,unseen_entropy\n";
    for (size_t d = 0; d < draws->draws.size(); ++d) {
      phibp::Rng rng = phibp::Rng(seed, 0x9C4D).derive(d);
      const auto& post = draws->draws[d];
      auto pd = phibp::sample_predictive(rng, post, counts.sample_sizes, m);
      auto ent = phibp::unseen_entropy(rng, post, counts.sample_sizes, m);
      for (int j = 0; j < counts.num_groups(); ++j) {
        long c1 = 0, species_j = 0;
        for (const auto& sp : pd.new_species) {
          c1 += sp.counts[size_t(j)];
          if (sp.counts[size_t(j)] > 0) ++species_j;
        }
        long c2 = 0, c3 = 0;
        for (long l = 0; l < counts.num_species(); ++l) {
          c2 += pd.comp2_counts[size_t(j)][size_t(l)];
          c3 += pd.comp3_counts[size_t(j)][size_t(l)];
        }
        main_csv << d << ',' << counts.group_ids[size_t(j)] << ',' << species_j << ','
                 << c1 << ',' << c2 << ',' << c3 << '\n';
        ent_csv << d << ',' << counts.group_ids[size_t(j)] << ',';
        if (std::isnan(ent[size_t(j)]))
          ent_csv << '\n';
        else
          ent_csv << fmt(ent[size_t(j)]) << '\n';
      }
    }
    write_file(draws_csv_path, main_csv.str());
    write_file(entropy_csv_path, ent_csv.str());
    return PHIBP_OK;
  });
}

phibp_status phibp_loglik_csv(const phibp_counts* train, const phibp_counts* test,
                              const phibp_chains* cs, const double* m_new,
                              int64_t m_len, const char* config_json, uint64_t seed,
                              const char* out_csv_path) {
  if (!train || !test || !cs || !m_new || !out_csv_path)
    return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    int quad_nodes = 64, aug_sweeps = 20, threads = 0;
    long max_records = 0;
    if (config_json) {
      json j = json::parse(config_json);
      quad_nodes = j.value("quad_nodes", 64);
      aug_sweeps = j.value("aug_sweeps", 20);
      max_records = j.value("max_records", 0L);
      threads = j.value("threads", 0);
    }
    phibp::CountMatrix tr = train->cm;
    tr.drop_zero_columns();
    auto aligned = phibp::align_test_matrix(tr, test->cm);
    std::vector<double> m(m_new, m_new + m_len);
    if (int64_t(tr.num_groups()) != m_len)
      throw std::domain_error("loglik: m has wrong length");

    std::vector<const phibp::ChainRecord*> records;
    for (const auto& chain : cs->cs.chains)
      for (const auto& rec : chain) records.push_back(&rec);
    if (records.empty()) throw std::runtime_error("loglik: no chain records");
    long stride = 1;
    if (max_records > 0 && long(records.size()) > max_records)
      stride = (long(records.size()) + max_records - 1) / max_records;
    std::vector<const phibp::ChainRecord*> used;
    for (size_t i = 0; i < records.size(); i += size_t(stride)) used.push_back(records[i]);

    double zeta0 = cs->cs.config.zeta0 > 0 ? cs->cs.config.zeta0 : 1.0;
    double zetag = cs->cs.config.zeta_group > 0 ? cs->cs.config.zeta_group : 1.0;
    std::vector<phibp::PredictiveLoglik> lls(used.size());
    phibp::parallel_for(long(used.size()), threads, [&](long i) {
      phibp::Rng rng = phibp::Rng(seed, 0x1091).derive(std::uint64_t(i));
      auto draw = phibp::sample_posterior_draw(rng, tr, used[size_t(i)]->params, zeta0,
                                               zetag, aug_sweeps);
      std::vector<std::vector<long>> x(size_t(tr.num_groups()),
                                       std::vector<long>(size_t(tr.num_species()), 0));
      for (int j = 0; j < tr.num_groups(); ++j)
        for (long l = 0; l < tr.num_species(); ++l)
          x[size_t(j)][size_t(l)] = draw.cells[size_t(j)][size_t(l)].x;
      lls[size_t(i)] = phibp::predictive_loglik(tr, x, used[size_t(i)]->params, zeta0,
                                                zetag, aligned, m, quad_nodes);
    });
    std::ostringstream out;
    out << "record,loglik_novel,loglik_existing,loglik_total\n";
    for (size_t i = 0; i < lls.size(); ++i)
      out << i << ',' << fmt(lls[i].novel) << ',' << fmt(lls[i].existing) << ','
          << fmt(lls[i].total()) << '\n';
    write_file(out_csv_path, out.str());
    return PHIBP_OK;
  });
}

phibp_status phibp_diversity_csv(const phibp_draws* draws, const phibp_counts* cm,
                                 const char* alpha_csv_path,
                                 const char* beta_csv_path) {
  if (!draws || !cm || !alpha_csv_path || !beta_csv_path)
    return fail(PHIBP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    phibp::CountMatrix counts = cm->cm;
    counts.drop_zero_columns();
    std::ostringstream alpha_csv, beta_csv;
    alpha_csv << "draw,group,shannon\n";
    beta_csv << "draw,group_a,group_b,bray_curtis\n";
    for (size_t d = 0; d < draws->draws.size(); ++d) {
      const auto& draw = draws->draws[d];
      for (int j = 0; j < draw.num_groups(); ++j)
        alpha_csv << d << ',' << counts.group_ids[size_t(j)] << ','
                  << fmt(phibp::shannon_alpha(draw, j)) << '\n';
      for (int a = 0; a < draw.num_groups(); ++a)
        for (int b = a + 1; b < draw.num_groups(); ++b)
          beta_csv << d << ',' << counts.group_ids[size_t(a)] << ','
                   << counts.group_ids[size_t(b)] << ','
                   << fmt(phibp::bray_curtis(draw, a, b)) << '\n';
    }
    write_file(alpha_csv_path, alpha_csv.str());
    write_file(beta_csv_path, beta_csv.str());
    return PHIBP_OK;
  });
}

}  // extern "C"
