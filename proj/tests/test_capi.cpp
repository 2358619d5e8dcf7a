// End-to-end exercise of the shared-library C interface.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "phibp.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("phibp_capi_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kSimConfig = R"({
  "base": {"alpha": 0.5, "theta": 3.0, "zeta": 1.0},
  "groups": [{"alpha": 0.3, "theta": 1.0}, {"alpha": 0.0, "theta": 1.5}],
  "M": [6, 8]
})";

const char* kFitConfig = R"({
  "prior": "gg", "chains": 2, "steps": 120, "burnin": 60, "thin": 6, "delta": 0.3
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("null arguments are rejected with messages") {
  CHECK(phibp_counts_load(nullptr, nullptr, 0, nullptr) == PHIBP_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(phibp_last_error()) > 0);
  phibp_counts* cm = nullptr;
  CHECK(phibp_counts_load("/definitely/not/here.csv", nullptr, 0, &cm) != PHIBP_OK);
  CHECK(cm == nullptr);
}

TEST_CASE("version string") { CHECK(std::strlen(phibp_version()) >= 5); }

TEST_CASE("whole pipeline through the C surface") {
  TempDir tmp;
  phibp_counts* cm = nullptr;
  char* latents = nullptr;
  REQUIRE(phibp_simulate(kSimConfig, 11, &cm, &latents) == PHIBP_OK);
  REQUIRE(cm != nullptr);
  CHECK(latents != nullptr);
  CHECK(std::string(latents).find("x_total") != std::string::npos);
  phibp_string_free(latents);
  CHECK(phibp_counts_num_groups(cm) == 2);
  const int64_t r = phibp_counts_num_species(cm);
  REQUIRE(r >= 1);
  CHECK(phibp_counts_cell(cm, 0, 0) >= 0);
  CHECK(phibp_counts_cell(cm, 5, 0) == -1);

  // save / load round trip
  REQUIRE(phibp_counts_save(cm, tmp.file("counts.csv").c_str()) == PHIBP_OK);
  REQUIRE(phibp_counts_save_sample_sizes(cm, tmp.file("sizes.csv").c_str()) == PHIBP_OK);
  phibp_counts* back = nullptr;
  REQUIRE(phibp_counts_load(tmp.file("counts.csv").c_str(), tmp.file("sizes.csv").c_str(),
                            0, &back) == PHIBP_OK);
  CHECK(phibp_counts_num_species(back) == r);

  // split
  double m[2] = {2.0, 2.0};
  phibp_counts* train = nullptr;
  phibp_counts* test = nullptr;
  REQUIRE(phibp_split(back, m, 2, 7, &train, &test) == PHIBP_OK);
  for (int64_t l = 0; l < r; ++l)
    CHECK(phibp_counts_cell(train, 0, l) + phibp_counts_cell(test, 0, l) ==
          phibp_counts_cell(back, 0, l));

  // fit on the training half
  phibp_chains* cs = nullptr;
  REQUIRE(phibp_fit(train, kFitConfig, 21, &cs) == PHIBP_OK);
  REQUIRE(phibp_chains_save_csv(cs, tmp.file("chains.csv").c_str()) == PHIBP_OK);
  char* diag = nullptr;
  REQUIRE(phibp_chains_diagnostics_json(cs, &diag) == PHIBP_OK);
  CHECK(std::string(diag).find("rhat") != std::string::npos);
  phibp_string_free(diag);

  phibp_chains* cs2 = nullptr;
  REQUIRE(phibp_chains_load_csv(tmp.file("chains.csv").c_str(), &cs2) == PHIBP_OK);

  // posterior draws + diversity + predictive outputs
  phibp_draws* draws = nullptr;
  REQUIRE(phibp_posterior(train, cs2, R"({"max_draws": 6, "aug_sweeps": 5})", 31,
                          &draws) == PHIBP_OK);
  REQUIRE(phibp_draws_save_csv(draws, train, tmp.file("abundance.csv").c_str()) ==
          PHIBP_OK);
  CHECK(slurp(tmp.file("abundance.csv")).find("draw,group,species") == 0);

  REQUIRE(phibp_diversity_csv(draws, train, tmp.file("alpha.csv").c_str(),
                              tmp.file("beta.csv").c_str()) == PHIBP_OK);
  CHECK(slurp(tmp.file("alpha.csv")).find("shannon") != std::string::npos);

  REQUIRE(phibp_predict_csv(train, draws, m, 2, 41, tmp.file("pred.csv").c_str(),
                            tmp.file("entropy.csv").c_str()) == PHIBP_OK);
  CHECK(slurp(tmp.file("pred.csv")).find("comp1_count") != std::string::npos);

  REQUIRE(phibp_loglik_csv(train, test, cs2, m, 2,
                           R"({"quad_nodes": 32, "aug_sweeps": 5, "max_records": 8})", 51,
                           tmp.file("loglik.csv").c_str()) == PHIBP_OK);
  auto ll = slurp(tmp.file("loglik.csv"));
  CHECK(ll.find("loglik_total") != std::string::npos);
  CHECK(std::count(ll.begin(), ll.end(), '\n') >= 2);

  phibp_draws_free(draws);
  phibp_chains_free(cs);
  phibp_chains_free(cs2);
  phibp_counts_free(train);
  phibp_counts_free(test);
  phibp_counts_free(back);
  phibp_counts_free(cm);
}

TEST_CASE("simulation is reproducible through the C surface") {
  phibp_counts* a = nullptr;
  phibp_counts* b = nullptr;
  REQUIRE(phibp_simulate(kSimConfig, 99, &a, nullptr) == PHIBP_OK);
  REQUIRE(phibp_simulate(kSimConfig, 99, &b, nullptr) == PHIBP_OK);
  REQUIRE(phibp_counts_num_species(a) == phibp_counts_num_species(b));
  for (int64_t j = 0; j < 2; ++j)
    for (int64_t l = 0; l < phibp_counts_num_species(a); ++l)
      CHECK(phibp_counts_cell(a, j, l) == phibp_counts_cell(b, j, l));
  phibp_counts_free(a);
  phibp_counts_free(b);
}

TEST_CASE("bad fit config is an invalid-argument error") {
  phibp_counts* cm = nullptr;
  REQUIRE(phibp_simulate(kSimConfig, 5, &cm, nullptr) == PHIBP_OK);
  phibp_chains* cs = nullptr;
  CHECK(phibp_fit(cm, R"({"prior": "weird"})", 1, &cs) == PHIBP_ERR_INVALID_ARGUMENT);
  CHECK(phibp_fit(cm, R"({"steps": 10, "burnin": 20})", 1, &cs) ==
        PHIBP_ERR_INVALID_ARGUMENT);
  CHECK(cs == nullptr);
  phibp_counts_free(cm);
}
