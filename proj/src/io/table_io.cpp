#include "picrustkit/io/table_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"

namespace picrustkit {

namespace {

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  std::string clean = line;
  if (!clean.empty() && clean.back() == '\r') clean.pop_back();
  return text::split(clean, delimiter);
}

// Reads lines until the header: '#' comment lines are skipped unless the
// first cell is the '#OTU ID' header marker.
bool next_content_line(std::istream& in, char delimiter, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto cells = split_row(line, delimiter);
      if (!cells.empty() && cells[0] == "#OTU ID") return true;
      continue;
    }
    return true;
  }
  return false;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file '" + path.string() + "'");
  return in;
}

}  // namespace

char delimiter_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? ',' : '\t';
}

AbundanceTable parse_abundance_table(const std::filesystem::path& path,
                                     std::optional<FeatureKind> kind_hint) {
  auto in = open_or_throw(path);
  try {
    return parse_abundance_table(in, delimiter_for_path(path), kind_hint);
  } catch (const validation_error& e) {
    throw validation_error(path.string() + ": " + e.what());
  }
}

AbundanceTable parse_abundance_table(std::istream& in, char delimiter,
                                     std::optional<FeatureKind> kind_hint) {
  std::string line;
  if (!next_content_line(in, delimiter, line)) throw validation_error("empty abundance table");
  const auto header = split_row(line, delimiter);
  if (header.size() < 2) throw validation_error("header has no sample columns");

  AbundanceTable table;
  table.sample_ids.assign(header.begin() + 1, header.end());
  for (auto& id : table.sample_ids) {
    id = std::string(text::trim(id));
    if (id.empty()) throw validation_error("empty sample id in header");
  }

  std::vector<std::vector<double>> rows;
  std::set<std::string> seen;
  std::size_t row_number = 0;  // 1-based over data rows
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row_number;
    auto cells = split_row(line, delimiter);
    if (cells.size() != header.size()) {
      throw validation_error("row " + std::to_string(row_number) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
    }
    std::string id = std::string(text::trim(cells[0]));
    if (id.empty()) throw validation_error("row " + std::to_string(row_number) + " has an empty feature id");
    if (!seen.insert(id).second) throw validation_error("duplicate feature id '" + id + "'");
    table.feature_ids.push_back(id);

    std::vector<double> values(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      auto value = text::parse_double(cells[c]);
      if (!value || !std::isfinite(*value)) {
        throw validation_error("non-numeric cell '" + cells[c] + "' at row " +
                               std::to_string(row_number) + ", column " + std::to_string(c + 1));
      }
      if (*value < 0.0) {
        throw validation_error("negative value at row " + std::to_string(row_number) +
                               ", column " + std::to_string(c + 1));
      }
      values[c - 1] = *value;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw validation_error("empty abundance table");

  table.values.resize(Eigen::Index(rows.size()), Eigen::Index(table.sample_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
    }
  }

  if (kind_hint) {
    table.kind = *kind_hint;
    const FeatureKind inferred = infer_feature_kind(table.feature_ids);
    if (inferred != FeatureKind::unknown && inferred != table.kind) {
      diag::warn(std::string("feature ids look like ") + feature_kind_name(inferred) +
                 " but kind hint is " + feature_kind_name(table.kind));
    }
  } else {
    table.kind = infer_feature_kind(table.feature_ids);
  }
  validate(table);
  return table;
}

void write_abundance_table(const AbundanceTable& table, std::ostream& out) {
  out << "function";
  for (const auto& id : table.sample_ids) out << '\t' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < table.n_features(); ++i) {
    out << table.feature_ids[i];
    for (Eigen::Index j = 0; j < table.n_samples(); ++j) {
      out << '\t' << text::format_full(table.values(i, j));
    }
    out << '\n';
  }
}

void write_abundance_table(const AbundanceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write file '" + path.string() + "'");
  write_abundance_table(table, out);
}

SampleMetadata parse_metadata(const std::filesystem::path& path, const std::string& group_column,
                              const std::vector<std::string>& covariate_columns) {
  auto in = open_or_throw(path);
  try {
    return parse_metadata(in, delimiter_for_path(path), group_column, covariate_columns);
  } catch (const validation_error& e) {
    throw validation_error(path.string() + ": " + e.what());
  }
}

SampleMetadata parse_metadata(std::istream& in, char delimiter, const std::string& group_column,
                              const std::vector<std::string>& covariate_columns) {
  std::string line;
  if (!next_content_line(in, delimiter, line)) throw validation_error("empty metadata file");
  const auto header = split_row(line, delimiter);
  if (header.size() < 2) throw validation_error("metadata header needs a group column");

  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (std::string(text::trim(header[c])) == name) return c;
    }
    std::string available;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) available += ", ";
      available += "'" + std::string(text::trim(header[c])) + "'";
    }
    throw validation_error("column '" + name + "' not found; available columns: " + available);
  };

  const std::size_t group_idx = column_index(group_column);
  std::vector<std::size_t> covariate_idx;
  for (const auto& name : covariate_columns) covariate_idx.push_back(column_index(name));

  SampleMetadata meta;
  for (const auto& name : covariate_columns) meta.covariates[name] = {};
  std::set<std::string> seen;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row_number;
    auto cells = split_row(line, delimiter);
    if (cells.size() != header.size()) {
      throw validation_error("metadata row " + std::to_string(row_number) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
    }
    std::string id = std::string(text::trim(cells[0]));
    if (id.empty()) throw validation_error("metadata row " + std::to_string(row_number) + " has an empty sample id");
    if (!seen.insert(id).second) throw validation_error("duplicate sample id '" + id + "'");
    std::string label = std::string(text::trim(cells[group_idx]));
    if (label.empty()) {
      throw validation_error("sample '" + id + "' has an empty group label in column '" +
                             group_column + "'");
    }
    meta.sample_ids.push_back(std::move(id));
    meta.groups.push_back(std::move(label));
    for (std::size_t k = 0; k < covariate_idx.size(); ++k) {
      auto value = text::parse_double(cells[covariate_idx[k]]);
      if (!value) {
        throw validation_error("covariate '" + covariate_columns[k] + "' is not numeric for sample '" +
                               meta.sample_ids.back() + "'");
      }
      meta.covariates[covariate_columns[k]].push_back(*value);
    }
  }
  if (meta.sample_ids.empty()) throw validation_error("metadata file has no samples");
  validate(meta);
  return meta;
}

std::pair<AbundanceTable, SampleMetadata> align_samples(const AbundanceTable& table,
                                                        const SampleMetadata& meta) {
  std::vector<std::string> shared;
  for (const auto& id : table.sample_ids) {
    if (meta.sample_index(id)) shared.push_back(id);
  }
  std::sort(shared.begin(), shared.end());
  if (shared.empty()) throw validation_error("no samples shared between table and metadata");

  auto report_dropped = [&](const std::vector<std::string>& ids, const char* side) {
    std::vector<std::string> dropped;
    for (const auto& id : ids) {
      if (!std::binary_search(shared.begin(), shared.end(), id)) dropped.push_back(id);
    }
    if (!dropped.empty()) {
      diag::warn("align_samples: dropping " + std::to_string(dropped.size()) + " sample(s) from " +
                 side + ": " + text::join(dropped, ", "));
    }
  };
  report_dropped(table.sample_ids, "table");
  report_dropped(meta.sample_ids, "metadata");

  AbundanceTable out_table;
  out_table.feature_ids = table.feature_ids;
  out_table.kind = table.kind;
  out_table.sample_ids = shared;
  out_table.values.resize(table.n_features(), Eigen::Index(shared.size()));
  std::size_t col = 0;
  for (const auto& id : shared) {
    const auto it = std::find(table.sample_ids.begin(), table.sample_ids.end(), id);
    out_table.values.col(Eigen::Index(col++)) =
        table.values.col(Eigen::Index(it - table.sample_ids.begin()));
  }

  SampleMetadata out_meta;
  out_meta.sample_ids = shared;
  for (const auto& [name, values] : meta.covariates) out_meta.covariates[name] = {};
  for (const auto& id : shared) {
    const std::size_t idx = *meta.sample_index(id);
    out_meta.groups.push_back(meta.groups[idx]);
    for (const auto& [name, values] : meta.covariates) {
      out_meta.covariates[name].push_back(values[idx]);
    }
  }
  return {std::move(out_table), std::move(out_meta)};
}

}  // namespace picrustkit
