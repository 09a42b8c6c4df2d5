#include "picrustkit/kegg/ko_pathway_map.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"

#ifndef PICRUSTKIT_DATA_DIR
#define PICRUSTKIT_DATA_DIR ""
#endif

namespace picrustkit {

std::size_t KoToPathwayMap::ko_count() const {
  std::set<std::string> kos;
  for (const auto& [pathway, members] : entries) kos.insert(members.begin(), members.end());
  return kos.size();
}

std::size_t KoToPathwayMap::max_pathways_per_ko() const {
  std::map<std::string, std::size_t> counts;
  std::size_t best = 0;
  for (const auto& [pathway, members] : entries) {
    for (const auto& ko : members) best = std::max(best, ++counts[ko]);
  }
  return best;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("PICRUSTKIT_DATA_DIR"); env && *env) return env;
  return PICRUSTKIT_DATA_DIR;
}

KoToPathwayMap load_ko_map(const std::optional<std::filesystem::path>& path) {
  const std::filesystem::path file = path ? *path : default_data_dir() / "ko_pathway_map.tsv";
  std::ifstream in(file);
  if (!in) throw validation_error("cannot open KO-to-pathway map '" + file.string() + "'");
  try {
    auto map = parse_ko_map(in);
    diag::info("loaded KO-to-pathway map: " + std::to_string(map.pathway_count()) +
               " pathways, " + std::to_string(map.ko_count()) + " distinct KOs");
    return map;
  } catch (const validation_error& e) {
    throw validation_error(file.string() + ": " + e.what());
  }
}

KoToPathwayMap parse_ko_map(std::istream& in) {
  KoToPathwayMap map;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = text::trim(line.substr(1));
      if (text::starts_with(body, "provenance:")) {
        map.provenance = std::string(text::trim(body.substr(std::string("provenance:").size())));
      }
      continue;
    }
    const auto cells = text::split(line, '\t');
    if (cells.size() != 2) {
      throw validation_error("line " + std::to_string(line_number) +
                             ": expected 'pathway_id<TAB>KO,KO,...'");
    }
    const std::string pathway = std::string(text::trim(cells[0]));
    if (!is_kegg_pathway_id(pathway)) {
      throw validation_error("line " + std::to_string(line_number) + ": bad pathway id '" +
                             pathway + "'");
    }
    if (map.entries.count(pathway)) {
      throw validation_error("line " + std::to_string(line_number) + ": duplicate pathway '" +
                             pathway + "'");
    }
    std::set<std::string> members;
    for (const auto& raw : text::split(cells[1], ',')) {
      const std::string ko = std::string(text::trim(raw));
      if (ko.empty()) continue;
      if (!is_ko_id(ko)) {
        throw validation_error("line " + std::to_string(line_number) + ": bad KO id '" + ko + "'");
      }
      members.insert(ko);
    }
    if (members.empty()) {
      throw validation_error("line " + std::to_string(line_number) + ": pathway '" + pathway +
                             "' has no members");
    }
    map.entries.emplace(pathway, std::move(members));
  }
  if (map.entries.empty()) throw validation_error("empty KO-to-pathway map");
  return map;
}

Ko2KeggResult ko2kegg_abundance(const AbundanceTable& ko_table, const KoToPathwayMap& map) {
  if (ko_table.kind != FeatureKind::ko) {
    if (ko_table.kind == FeatureKind::unknown) {
      diag::warn("ko2kegg_abundance: input kind is UNKNOWN; treating features as KO ids");
    } else {
      throw validation_error(std::string("ko2kegg_abundance: input kind is ") +
                             feature_kind_name(ko_table.kind) + ", expected KO");
    }
  }

  std::map<std::string, Eigen::Index> ko_row;
  for (Eigen::Index i = 0; i < ko_table.n_features(); ++i) ko_row.emplace(ko_table.feature_ids[i], i);

  Ko2KeggResult result;
  std::vector<std::pair<std::string, Eigen::RowVectorXd>> surviving;
  for (const auto& [pathway, members] : map.entries) {  // std::map: ascending pathway id
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(ko_table.n_samples());
    std::size_t matched = 0;
    for (const auto& ko : members) {  // std::set: ascending KO id fixes summation order
      auto it = ko_row.find(ko);
      if (it == ko_row.end()) continue;
      ++matched;
      row += ko_table.values.row(it->second);
    }
    if (matched == 0 || row.maxCoeff() <= 0.0) {
      result.dropped.push_back(pathway);
      continue;
    }
    result.report.push_back({pathway, matched, members.size()});
    surviving.emplace_back(pathway, std::move(row));
  }

  if (surviving.empty()) {
    throw validation_error(
        "ko2kegg_abundance: no pathway retained any abundance; is the input really a KO table?");
  }

  AbundanceTable out;
  out.kind = FeatureKind::kegg_pathway;
  out.sample_ids = ko_table.sample_ids;
  out.values.resize(Eigen::Index(surviving.size()), ko_table.n_samples());
  for (std::size_t i = 0; i < surviving.size(); ++i) {
    out.feature_ids.push_back(surviving[i].first);
    out.values.row(Eigen::Index(i)) = surviving[i].second;
  }
  validate(out);
  result.table = std::move(out);
  return result;
}

}  // namespace picrustkit
