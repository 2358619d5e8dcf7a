// phibp command-line driver.  All statistical work happens behind the C API in
// libphibp; this translation unit only parses flags, shuffles files, and writes
// run manifests.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phibp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(phibp_status st, const std::string& what) {
  if (st != PHIBP_OK)
    throw CliError(what + ": " + phibp_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw CliError("cannot write " + path);
  out << content;
}

struct CountsHandle {
  phibp_counts* ptr = nullptr;
  ~CountsHandle() { phibp_counts_free(ptr); }
};
struct ChainsHandle {
  phibp_chains* ptr = nullptr;
  ~ChainsHandle() { phibp_chains_free(ptr); }
};
struct DrawsHandle {
  phibp_draws* ptr = nullptr;
  ~DrawsHandle() { phibp_draws_free(ptr); }
};

CountsHandle load_counts(const std::string& path, const std::string& sizes,
                         bool keep_zero = false) {
  CountsHandle h;
  check(phibp_counts_load(path.c_str(), sizes.empty() ? nullptr : sizes.c_str(),
                          keep_zero ? 1 : 0, &h.ptr),
        "loading " + path);
  return h;
}

std::vector<double> parse_m(const std::vector<double>& m, int64_t groups,
                            const std::string& flag) {
  if (m.empty()) throw CliError(flag + " is required");
  if (int64_t(m.size()) == 1) return std::vector<double>(size_t(groups), m[0]);
  if (int64_t(m.size()) != groups)
    throw CliError(flag + " needs 1 or num_groups values (groups=" +
                   std::to_string(groups) + ")");
  return m;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    std::uint64_t seed, const json& config,
                    const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "phibp";
  m["version"] = phibp_version();
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = config;
  m["outputs"] = outputs;
  write_file((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson hierarchical Indian buffet process engine"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", counts_path, sizes_path, fit_path, test_path;
  std::uint64_t seed = 0;
  int chains = 3;
  long steps = 10000, burnin = -1, thin = 10, max_draws = 0, max_records = 0;
  double delta = 0.1;
  std::string prior = "gg";
  std::vector<double> m_flag;
  int quad_nodes = 64, sweeps = 20;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  sim->add_option("--config", config_path, "model config JSON")->required();
  add_common(sim);

  auto* split = app.add_subcommand("split", "binomial train/test split");
  split->add_option("--counts", counts_path)->required();
  split->add_option("--sizes", sizes_path, "sample-size sidecar");
  split->add_option("--m", m_flag, "test sample count per group (1 value or per group)");
  add_common(split);

  auto* fit = app.add_subcommand("fit", "MCMC over hyperparameters and latents");
  fit->add_option("--counts", counts_path)->required();
  fit->add_option("--sizes", sizes_path);
  fit->add_option("--config", config_path, "fit config JSON (flags override)");
  auto* opt_chains = fit->add_option("--chains", chains, "number of chains");
  auto* opt_steps = fit->add_option("--steps", steps);
  auto* opt_burnin = fit->add_option("--burnin", burnin);
  auto* opt_thin = fit->add_option("--thin", thin);
  auto* opt_delta = fit->add_option("--delta", delta, "proposal scale");
  auto* opt_prior = fit->add_option("--prior", prior)->check(CLI::IsMember({"gg", "gamma"}));
  add_common(fit);

  auto* diag = app.add_subcommand("diagnose", "convergence diagnostics for a fit");
  diag->add_option("--fit", fit_path, "chains CSV")->required();
  add_common(diag);

  auto* post = app.add_subcommand("posterior", "posterior abundance draws");
  post->add_option("--counts", counts_path)->required();
  post->add_option("--sizes", sizes_path);
  post->add_option("--fit", fit_path, "chains CSV")->required();
  post->add_option("--draws", max_draws, "cap on number of draws (0 = all records)");
  post->add_option("--sweeps", sweeps, "augmentation sweeps per draw");
  add_common(post);

  auto* pred = app.add_subcommand("predict", "predictive draws and unseen entropy");
  pred->add_option("--counts", counts_path)->required();
  pred->add_option("--sizes", sizes_path);
  pred->add_option("--fit", fit_path)->required();
  pred->add_option("--m", m_flag, "new samples per group")->required();
  pred->add_option("--draws", max_draws);
  pred->add_option("--sweeps", sweeps);
  add_common(pred);

  auto* ppc = app.add_subcommand("ppc", "predictive log-likelihood of held-out counts");
  ppc->add_option("--counts", counts_path, "training counts")->required();
  ppc->add_option("--sizes", sizes_path);
  ppc->add_option("--test", test_path, "test counts")->required();
  ppc->add_option("--fit", fit_path)->required();
  ppc->add_option("--m", m_flag, "test samples per group")->required();
  ppc->add_option("--quad-nodes", quad_nodes);
  ppc->add_option("--records", max_records, "cap on chain records (0 = all)");
  ppc->add_option("--sweeps", sweeps);
  add_common(ppc);

  auto* div = app.add_subcommand("diversity", "alpha/beta diversity per posterior draw");
  div->add_option("--counts", counts_path)->required();
  div->add_option("--sizes", sizes_path);
  div->add_option("--fit", fit_path)->required();
  div->add_option("--draws", max_draws);
  div->add_option("--sweeps", sweeps);
  add_common(div);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      std::string cfg_text = read_file(config_path);
      CountsHandle cm;
      char* latents = nullptr;
      check(phibp_simulate(cfg_text.c_str(), seed, &cm.ptr, &latents), "simulate");
      std::string counts_out = out_path(out_dir, "counts.csv");
      check(phibp_counts_save(cm.ptr, counts_out.c_str()), "saving counts");
      std::string sizes_out = out_path(out_dir, "sample_sizes.csv");
      check(phibp_counts_save_sample_sizes(cm.ptr, sizes_out.c_str()), "saving sizes");
      write_file(out_path(out_dir, "latents.json"), std::string(latents) + "\n");
      phibp_string_free(latents);
      write_manifest(out_dir, "simulate", seed, json::parse(cfg_text),
                     {"counts.csv", "sample_sizes.csv", "latents.json"});
    } else if (split->parsed()) {
      auto cm = load_counts(counts_path, sizes_path, /*keep_zero=*/true);
      auto m = parse_m(m_flag, phibp_counts_num_groups(cm.ptr), "--m");
      CountsHandle train, test;
      check(phibp_split(cm.ptr, m.data(), int64_t(m.size()), seed, &train.ptr, &test.ptr),
            "split");
      check(phibp_counts_save(train.ptr, out_path(out_dir, "train.csv").c_str()), "saving train");
      check(phibp_counts_save(test.ptr, out_path(out_dir, "test.csv").c_str()), "saving test");
      check(phibp_counts_save_sample_sizes(train.ptr, out_path(out_dir, "train_sizes.csv").c_str()),
            "saving train sizes");
      check(phibp_counts_save_sample_sizes(test.ptr, out_path(out_dir, "test_sizes.csv").c_str()),
            "saving test sizes");
      write_manifest(out_dir, "split", seed, json{{"counts", counts_path}, {"m", m}},
                     {"train.csv", "test.csv", "train_sizes.csv", "test_sizes.csv"});
    } else if (fit->parsed()) {
      json cfg = config_path.empty() ? json::object() : json::parse(read_file(config_path));
      if (opt_chains->count() || !cfg.contains("chains")) cfg["chains"] = chains;
      if (opt_steps->count() || !cfg.contains("steps")) cfg["steps"] = steps;
      if (opt_burnin->count()) cfg["burnin"] = burnin;
      if (!cfg.contains("burnin") || cfg["burnin"].get<long>() < 0)
        cfg["burnin"] = cfg["steps"].get<long>() / 2;
      if (opt_thin->count() || !cfg.contains("thin")) cfg["thin"] = thin;
      if (opt_delta->count() || !cfg.contains("delta")) cfg["delta"] = delta;
      if (opt_prior->count() || !cfg.contains("prior")) cfg["prior"] = prior;
      auto cm = load_counts(counts_path, sizes_path);
      ChainsHandle cs;
      check(phibp_fit(cm.ptr, cfg.dump().c_str(), seed, &cs.ptr), "fit");
      check(phibp_chains_save_csv(cs.ptr, out_path(out_dir, "chains.csv").c_str()),
            "saving chains");
      char* diag_json = nullptr;
      check(phibp_chains_diagnostics_json(cs.ptr, &diag_json), "diagnostics");
      write_file(out_path(out_dir, "diagnostics.json"), std::string(diag_json) + "\n");
      phibp_string_free(diag_json);
      write_manifest(out_dir, "fit", seed, cfg, {"chains.csv", "diagnostics.json"});
    } else if (diag->parsed()) {
      ChainsHandle cs;
      check(phibp_chains_load_csv(fit_path.c_str(), &cs.ptr), "loading chains");
      char* diag_json = nullptr;
      check(phibp_chains_diagnostics_json(cs.ptr, &diag_json), "diagnostics");
      write_file(out_path(out_dir, "diagnostics.json"), std::string(diag_json) + "\n");
      phibp_string_free(diag_json);
      write_manifest(out_dir, "diagnose", seed, json{{"fit", fit_path}},
                     {"diagnostics.json"});
    } else if (post->parsed()) {
      auto cm = load_counts(counts_path, sizes_path);
      ChainsHandle cs;
      check(phibp_chains_load_csv(fit_path.c_str(), &cs.ptr), "loading chains");
      json cfg{{"max_draws", max_draws}, {"aug_sweeps", sweeps}};
      DrawsHandle draws;
      check(phibp_posterior(cm.ptr, cs.ptr, cfg.dump().c_str(), seed, &draws.ptr),
            "posterior");
      check(phibp_draws_save_csv(draws.ptr, cm.ptr, out_path(out_dir, "abundance.csv").c_str()),
            "saving abundance");
      write_manifest(out_dir, "posterior", seed, cfg, {"abundance.csv"});
    } else if (pred->parsed()) {
      auto cm = load_counts(counts_path, sizes_path);
      ChainsHandle cs;
      check(phibp_chains_load_csv(fit_path.c_str(), &cs.ptr), "loading chains");
      auto m = parse_m(m_flag, phibp_counts_num_groups(cm.ptr), "--m");
      json cfg{{"max_draws", max_draws}, {"aug_sweeps", sweeps}, {"m", m}};
      DrawsHandle draws;
      check(phibp_posterior(cm.ptr, cs.ptr, cfg.dump().c_str(), seed, &draws.ptr),
            "posterior");
      check(phibp_predict_csv(cm.ptr, draws.ptr, m.data(), int64_t(m.size()), seed,
                              out_path(out_dir, "predictive.csv").c_str(),
                              out_path(out_dir, "unseen_entropy.csv").c_str()),
            "predict");
      write_manifest(out_dir, "predict", seed, cfg,
                     {"predictive.csv", "unseen_entropy.csv"});
    } else if (ppc->parsed()) {
      auto train = load_counts(counts_path, sizes_path, /*keep_zero=*/true);
      auto test = load_counts(test_path, "", /*keep_zero=*/true);
      ChainsHandle cs;
      check(phibp_chains_load_csv(fit_path.c_str(), &cs.ptr), "loading chains");
      auto m = parse_m(m_flag, phibp_counts_num_groups(train.ptr), "--m");
      json cfg{{"quad_nodes", quad_nodes},
               {"aug_sweeps", sweeps},
               {"max_records", max_records},
               {"m", m}};
      check(phibp_loglik_csv(train.ptr, test.ptr, cs.ptr, m.data(), int64_t(m.size()),
                             cfg.dump().c_str(), seed,
                             out_path(out_dir, "loglik.csv").c_str()),
            "ppc");
      write_manifest(out_dir, "ppc", seed, cfg, {"loglik.csv"});
    } else if (div->parsed()) {
      auto cm = load_counts(counts_path, sizes_path);
      ChainsHandle cs;
      check(phibp_chains_load_csv(fit_path.c_str(), &cs.ptr), "loading chains");
      json cfg{{"max_draws", max_draws}, {"aug_sweeps", sweeps}};
      DrawsHandle draws;
      check(phibp_posterior(cm.ptr, cs.ptr, cfg.dump().c_str(), seed, &draws.ptr),
            "posterior");
      check(phibp_diversity_csv(draws.ptr, cm.ptr, out_path(out_dir, "alpha.csv").c_str(),
                                out_path(out_dir, "beta.csv").c_str()),
            "diversity");
      write_manifest(out_dir, "diversity", seed, cfg, {"alpha.csv", "beta.csv"});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
