#ifndef PHIBP_IO_HPP
#define PHIBP_IO_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phibp/model.hpp"
#include "phibp/rng.hpp"

namespace phibp {

// Species-by-group aggregated count matrix: groups are rows, species columns.
// sample_sizes[j] holds sum_i gamma_ij for group j (the number of samples when
// all weights are 1); it defaults to 1 when no sidecar is given.
struct CountMatrix {
  std::vector<std::string> group_ids;
  std::vector<std::string> species_ids;
  std::vector<std::vector<long>> values;  // [group][species]
  std::vector<double> sample_sizes;       // per group, > 0

  int num_groups() const { return int(group_ids.size()); }
  long num_species() const { return long(species_ids.size()); }
  long at(int j, long l) const { return values[size_t(j)][size_t(l)]; }
  long column_total(long l) const;
  long group_total(int j) const;
  void validate() const;

  // Drops all-zero species columns (they carry no likelihood factors).
  // Returns the ids of dropped columns.
  std::vector<std::string> drop_zero_columns();
};

struct LoadOptions {
  bool drop_zero_columns = true;
  std::optional<std::string> sample_sizes_path;  // optional sidecar: group,M per line
};

// Delimited text (comma or tab, auto-detected): header row of species ids, one
// row per group starting with its id.  Throws std::runtime_error with row/column
// location on malformed input.  Warnings (dropped columns) go to *warnings.
CountMatrix load_count_matrix(const std::string& path, const LoadOptions& opts = {},
                              std::vector<std::string>* warnings = nullptr);
void save_count_matrix(const CountMatrix& cm, const std::string& path);
void save_sample_sizes(const CountMatrix& cm, const std::string& path);

// Cell-wise binomial thinning: train[j][l] ~ Binom(N[j][l], M_j/(M_j+m_j)),
// test = N - train.  The split matrices keep the full species set (novel species
// in test show up as zero columns in train).
std::pair<CountMatrix, CountMatrix> binomial_split(Rng& rng, const CountMatrix& counts,
                                                   const std::vector<double>& m_new);

// Model parameters from a JSON config string; see README for the schema.
ModelParams model_params_from_json(const std::string& json_text);
std::string model_params_to_json(const ModelParams& params);

// Serialize a simulated dataset's latent truth (allocation, OTU counts, truth
// parameters) to JSON.
std::string dataset_latents_to_json(const SyntheticDataset& ds);

CountMatrix counts_from_dataset(const SyntheticDataset& ds,
                                const std::vector<std::string>* group_ids = nullptr);

}  // namespace phibp

#endif
