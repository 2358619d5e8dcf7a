#include "phibp/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace phibp {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string chains_to_csv(const ChainSet& cs) {
  std::ostringstream out;
  out << "step,chain";
  for (const auto& name : cs.param_names) out << ',' << name;
  out << ",log_joint\n";
  for (size_t c = 0; c < cs.chains.size(); ++c) {
    for (const auto& rec : cs.chains[c]) {
      out << rec.step << ',' << c;
      for (int p = 0; p < int(cs.param_names.size()); ++p)
        out << ',' << fmt_double(record_param(rec, p));
      out << ',' << fmt_double(rec.log_joint) << '\n';
    }
  }
  return out.str();
}

void save_chains_csv(const ChainSet& cs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write chains file: " + path);
  out << chains_to_csv(cs);
}

ChainSet load_chains_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chains file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty chains file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 5 || header[0] != "step" || header[1] != "chain" ||
      header.back() != "log_joint")
    throw std::runtime_error("unrecognized chains CSV header");
  const int np = int(header.size()) - 3;
  const int J = (np - 2) / 2;
  if (np != hyper_param_count(J))
    throw std::runtime_error("chains CSV has an unexpected parameter count");

  ChainSet cs;
  cs.param_names.assign(header.begin() + 2, header.end() - 1);
  size_t row = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw std::runtime_error("chains CSV row " + std::to_string(row) + " is ragged");
    ChainRecord rec;
    rec.step = std::stol(cells[0]);
    size_t chain = std::stoul(cells[1]);
    rec.params.alpha0 = std::stod(cells[2]);
    rec.params.theta0 = std::stod(cells[3]);
    for (int j = 0; j < J; ++j) {
      rec.params.alpha.push_back(std::stod(cells[size_t(4 + 2 * j)]));
      rec.params.theta.push_back(std::stod(cells[size_t(5 + 2 * j)]));
    }
    rec.log_joint = std::stod(cells.back());
    if (cs.chains.size() <= chain) cs.chains.resize(chain + 1);
    cs.chains[chain].push_back(std::move(rec));
  }
  bool any_alpha = false;
  for (const auto& chain : cs.chains)
    for (const auto& rec : chain)
      if (rec.params.alpha0 != 0.0) any_alpha = true;
  cs.config.prior = any_alpha ? PriorKind::GG : PriorKind::Gamma;
  cs.config.chains = int(cs.chains.size());
  return cs;
}

std::string diagnostics_json(const ChainSet& cs) {
  nlohmann::json j;
  j["chains"] = cs.chains.size();
  j["records_per_chain"] = cs.records_per_chain();
  j["prior"] = cs.config.prior == PriorKind::GG ? "gg" : "gamma";
  nlohmann::json rh = nlohmann::json::object();
  if (cs.chains.size() >= 2 && cs.records_per_chain() >= 4) {
    auto values = rhat_all(cs);
    for (size_t p = 0; p < cs.param_names.size(); ++p)
      rh[cs.param_names[p]] = values[p];
  }
  j["rhat"] = rh;
  nlohmann::json acc = nlohmann::json::array();
  for (const auto& chain_acc : cs.acceptance) {
    nlohmann::json one = nlohmann::json::object();
    for (size_t p = 0; p < cs.param_names.size() && p < chain_acc.size(); ++p)
      one[cs.param_names[p]] = chain_acc[p];
    acc.push_back(one);
  }
  j["acceptance"] = acc;
  return j.dump(2);
}

std::string abundance_to_csv(const std::vector<PosteriorAbundanceDraw>& draws,
                             const CountMatrix& counts) {
  std::ostringstream out;
  out << "draw,group,species,h,sigma_tilde,x,n\n";
  for (size_t d = 0; d < draws.size(); ++d) {
    const auto& draw = draws[d];
    for (int j = 0; j < draw.num_groups(); ++j) {
      for (long l = 0; l < draw.num_species(); ++l) {
        const auto& cell = draw.cells[size_t(j)][size_t(l)];
        out << d << ',' << counts.group_ids[size_t(j)] << ','
            << counts.species_ids[size_t(l)] << ',' << fmt_double(draw.h[size_t(l)])
            << ',' << fmt_double(cell.sigma_tilde) << ',' << cell.x << ',' << cell.n
            << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace phibp
