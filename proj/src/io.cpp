#include "phibp/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace phibp {

using nlohmann::json;

long CountMatrix::column_total(long l) const {
  long t = 0;
  for (int j = 0; j < num_groups(); ++j) t += at(j, l);
  return t;
}

long CountMatrix::group_total(int j) const {
  const auto& row = values[size_t(j)];
  return std::accumulate(row.begin(), row.end(), 0L);
}

void CountMatrix::validate() const {
  if (group_ids.empty()) throw std::runtime_error("CountMatrix: no groups");
  if (values.size() != group_ids.size() || sample_sizes.size() != group_ids.size())
    throw std::runtime_error("CountMatrix: inconsistent dimensions");
  for (const auto& row : values) {
    if (row.size() != species_ids.size())
      throw std::runtime_error("CountMatrix: ragged rows");
    for (long v : row)
      if (v < 0) throw std::runtime_error("CountMatrix: negative count");
  }
  for (double m : sample_sizes)
    if (!(m > 0.0)) throw std::runtime_error("CountMatrix: sample sizes must be > 0");
}

std::vector<std::string> CountMatrix::drop_zero_columns() {
  std::vector<std::string> dropped;
  std::vector<long> keep;
  for (long l = 0; l < num_species(); ++l) {
    if (column_total(l) >= 1)
      keep.push_back(l);
    else
      dropped.push_back(species_ids[size_t(l)]);
  }
  if (dropped.empty()) return dropped;
  std::vector<std::string> ids;
  ids.reserve(keep.size());
  for (long l : keep) ids.push_back(species_ids[size_t(l)]);
  for (auto& row : values) {
    std::vector<long> nr;
    nr.reserve(keep.size());
    for (long l : keep) nr.push_back(row[size_t(l)]);
    row = std::move(nr);
  }
  species_ids = std::move(ids);
  return dropped;
}

namespace {

char detect_delim(const std::string& line) {
  return line.find('\t') != std::string::npos ? '\t' : ',';
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string strip(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long parse_count(const std::string& cell, size_t row, size_t col) {
  const std::string t = strip(cell);
  std::string loc = " at row " + std::to_string(row) + ", column " + std::to_string(col);
  if (t.empty()) throw std::runtime_error("empty count cell" + loc);
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(t, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("non-integer count '" + t + "'" + loc);
  }
  if (pos != t.size()) throw std::runtime_error("non-integer count '" + t + "'" + loc);
  if (v < 0) throw std::runtime_error("negative count '" + t + "'" + loc);
  return v;
}

LevyParams levy_from_json(const json& j) {
  LevyParams p;
  p.alpha = j.value("alpha", 0.0);
  p.theta = j.at("theta").get<double>();
  p.zeta = j.value("zeta", 1.0);
  p.validate();
  return p;
}

json levy_to_json(const LevyParams& p) {
  return json{{"alpha", p.alpha}, {"theta", p.theta}, {"zeta", p.zeta}};
}

}  // namespace

CountMatrix load_count_matrix(const std::string& path, const LoadOptions& opts,
                              std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open count matrix file: " + path);
  CountMatrix cm;
  std::string line;
  size_t row = 0;
  char delim = ',';
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row;
    if (strip(line).empty()) continue;
    if (cm.species_ids.empty() && cm.group_ids.empty() && row == 1) {
      delim = detect_delim(line);
      auto cells = split_line(line, delim);
      if (cells.size() < 2)
        throw std::runtime_error("header row needs at least one species column");
      for (size_t c = 1; c < cells.size(); ++c) {
        std::string id = strip(cells[c]);
        if (id.empty())
          throw std::runtime_error("empty species id at header column " + std::to_string(c + 1));
        cm.species_ids.push_back(id);
      }
      continue;
    }
    auto cells = split_line(line, delim);
    if (cells.size() != cm.species_ids.size() + 1)
      throw std::runtime_error("row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(cm.species_ids.size() + 1));
    cm.group_ids.push_back(strip(cells[0]));
    std::vector<long> vals(cm.species_ids.size());
    for (size_t c = 1; c < cells.size(); ++c) vals[c - 1] = parse_count(cells[c], row, c + 1);
    cm.values.push_back(std::move(vals));
  }
  if (cm.group_ids.empty()) throw std::runtime_error("count matrix has no group rows");
  cm.sample_sizes.assign(cm.group_ids.size(), 1.0);

  if (opts.sample_sizes_path) {
    std::ifstream ms(*opts.sample_sizes_path);
    if (!ms) throw std::runtime_error("cannot open sample-size sidecar: " + *opts.sample_sizes_path);
    std::string mline;
    while (std::getline(ms, mline)) {
      if (!mline.empty() && mline.back() == '\r') mline.pop_back();
      if (strip(mline).empty()) continue;
      auto cells = split_line(mline, detect_delim(mline));
      if (cells.size() != 2) throw std::runtime_error("sidecar rows must be 'group,M'");
      std::string g = strip(cells[0]);
      if (g == "group") continue;  // header
      auto it = std::find(cm.group_ids.begin(), cm.group_ids.end(), g);
      if (it == cm.group_ids.end())
        throw std::runtime_error("sidecar group '" + g + "' not in count matrix");
      double m = std::stod(strip(cells[1]));
      if (!(m > 0.0)) throw std::runtime_error("sidecar M must be > 0 for group " + g);
      cm.sample_sizes[size_t(it - cm.group_ids.begin())] = m;
    }
  }
  if (opts.drop_zero_columns) {
    auto dropped = cm.drop_zero_columns();
    if (warnings)
      for (const auto& id : dropped)
        warnings->push_back("dropping all-zero species column '" + id + "'");
  }
  cm.validate();
  return cm;
}

void save_count_matrix(const CountMatrix& cm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write count matrix file: " + path);
  out << "group";
  for (const auto& id : cm.species_ids) out << ',' << id;
  out << '\n';
  for (int j = 0; j < cm.num_groups(); ++j) {
    out << cm.group_ids[size_t(j)];
    for (long l = 0; l < cm.num_species(); ++l) out << ',' << cm.at(j, l);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_sample_sizes(const CountMatrix& cm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sample-size file: " + path);
  out << "group,M\n";
  for (int j = 0; j < cm.num_groups(); ++j)
    out << cm.group_ids[size_t(j)] << ',' << cm.sample_sizes[size_t(j)] << '\n';
}

std::pair<CountMatrix, CountMatrix> binomial_split(Rng& rng, const CountMatrix& counts,
                                                   const std::vector<double>& m_new) {
  counts.validate();
  if (m_new.size() != size_t(counts.num_groups()))
    throw std::domain_error("binomial_split: m has wrong length");
  for (double m : m_new)
    if (!(m > 0.0)) throw std::domain_error("binomial_split: m must be > 0 per group");
  CountMatrix train = counts, test = counts;
  for (int j = 0; j < counts.num_groups(); ++j) {
    double mj = counts.sample_sizes[size_t(j)];
    double p = mj / (mj + m_new[size_t(j)]);
    for (long l = 0; l < counts.num_species(); ++l) {
      long n = counts.at(j, l);
      long tr = rng.binomial(n, p);
      train.values[size_t(j)][size_t(l)] = tr;
      test.values[size_t(j)][size_t(l)] = n - tr;
    }
    test.sample_sizes[size_t(j)] = m_new[size_t(j)];
  }
  return {std::move(train), std::move(test)};
}

ModelParams model_params_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  ModelParams p;
  p.base = levy_from_json(j.at("base"));
  for (const auto& g : j.at("groups")) p.groups.push_back(levy_from_json(g));
  if (j.contains("gamma_weights")) {
    p.gamma_weights = j.at("gamma_weights").get<std::vector<std::vector<double>>>();
  } else if (j.contains("M")) {
    auto m = j.at("M").get<std::vector<double>>();
    if (m.size() != p.groups.size())
      throw std::runtime_error("config: M has wrong length");
    for (double mj : m) {
      long n = long(mj);
      if (double(n) != mj || n < 1)
        throw std::runtime_error("config: M entries must be positive integers");
      p.gamma_weights.push_back(std::vector<double>(size_t(n), 1.0));
    }
  } else {
    p.gamma_weights.assign(p.groups.size(), {1.0});
  }
  p.validate();
  return p;
}

std::string model_params_to_json(const ModelParams& params) {
  json j;
  j["base"] = levy_to_json(params.base);
  j["groups"] = json::array();
  for (const auto& g : params.groups) j["groups"].push_back(levy_to_json(g));
  j["gamma_weights"] = params.gamma_weights;
  return j.dump(2);
}

std::string dataset_latents_to_json(const SyntheticDataset& ds) {
  json j;
  j["truth"] = json::parse(model_params_to_json(ds.truth));
  j["num_species"] = ds.allocation.num_species;
  j["x_total"] = ds.allocation.x_total;
  j["x"] = ds.allocation.x;
  j["otu_counts"] = ds.otu_counts;
  j["counts"] = ds.counts;
  return j.dump();
}

CountMatrix counts_from_dataset(const SyntheticDataset& ds,
                                const std::vector<std::string>* group_ids) {
  CountMatrix cm;
  const int J = ds.num_groups();
  for (int j = 0; j < J; ++j) {
    cm.group_ids.push_back(group_ids ? (*group_ids)[size_t(j)]
                                     : "G" + std::to_string(j + 1));
    cm.sample_sizes.push_back(ds.truth.gamma_total(j));
  }
  for (long l = 0; l < ds.num_species(); ++l)
    cm.species_ids.push_back("sp" + std::to_string(l + 1));
  cm.values = ds.counts;
  cm.validate();
  return cm;
}

}  // namespace phibp
