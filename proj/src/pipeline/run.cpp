#include "picrustkit/pipeline/run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/io/table_io.hpp"
#include "picrustkit/kegg/ko_pathway_map.hpp"
#include "picrustkit/pipeline/manifest.hpp"
#include "picrustkit/viz/plots.hpp"

namespace picrustkit::pipeline {

namespace {

constexpr const char* kDaaHeader =
    "feature\tmethod\tgroup1\tgroup2\teffect\tlog2_fold_change\tp_value\tadjusted_p\t"
    "adjust_method\tnote";

double parse_value_or_na(const std::string& cell, const std::string& what) {
  if (cell == "NA") return std::numeric_limits<double>::quiet_NaN();
  const auto value = text::parse_double(cell);
  if (!value) throw validation_error("DA results: bad " + what + " value '" + cell + "'");
  return *value;
}

// Holds the .lock file for the duration of a run; a second concurrent run
// into the same directory fails fast.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".picrustkit.lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw validation_error("output directory '" + dir.string() +
                             "' is locked by another run (remove " + path_.string() +
                             " if that run crashed)");
    }
  }
  ~DirectoryLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

std::vector<daa::DaaResultRecord> read_daa_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open DA results '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(kDaaHeader, 0) != 0) {
    throw validation_error(path.string() + ": not a DA results table (unexpected header)");
  }
  std::vector<daa::DaaResultRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = text::split(line, '\t');
    if (cells.size() < 10) throw validation_error(path.string() + ": short DA results row");
    daa::DaaResultRecord r;
    r.feature_id = cells[0];
    r.method = cells[1];
    r.group1 = cells[2];
    r.group2 = cells[3];
    r.effect = parse_value_or_na(cells[4], "effect");
    r.log2_fold_change = parse_value_or_na(cells[5], "log2_fold_change");
    r.p_value = parse_value_or_na(cells[6], "p_value");
    r.adjusted_p = parse_value_or_na(cells[7], "adjusted_p");
    r.adjust_method = cells[8];
    r.note = cells[9];
    records.push_back(std::move(r));
  }
  return records;
}

void annotate_table_file(const std::filesystem::path& input, std::ostream& out,
                         std::optional<FeatureKind> kind, annotate::AnnotationMode mode,
                         const annotate::KeggClientConfig& client_config,
                         const std::optional<std::filesystem::path>& table_path) {
  std::ifstream in(input);
  if (!in) throw validation_error("cannot open '" + input.string() + "'");
  const char delimiter = delimiter_for_path(input);

  static const std::vector<std::string> kAnnotationColumns = {
      "pathway_name", "pathway_description", "pathway_class", "pathway_map", "annotation_source"};

  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header && line[0] == '#' && text::split(line, delimiter)[0] != "#OTU ID") continue;
    auto cells = text::split(line, delimiter);
    if (!have_header) {
      header = std::move(cells);
      have_header = true;
    } else {
      rows.push_back(std::move(cells));
    }
  }
  if (!have_header || rows.empty()) throw validation_error(input.string() + ": empty table");

  // Drop any previous annotation columns so re-annotation is idempotent.
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (std::find(kAnnotationColumns.begin(), kAnnotationColumns.end(), header[c]) ==
        kAnnotationColumns.end()) {
      keep.push_back(c);
    }
  }

  std::vector<std::string> ids;
  for (const auto& row : rows) {
    if (row.empty() || row[0].empty()) throw validation_error(input.string() + ": row without feature id");
    ids.push_back(row[0]);
  }
  const FeatureKind effective_kind = kind ? *kind : infer_feature_kind(ids);
  const auto records = annotate::annotate_features(ids, effective_kind, mode, client_config, table_path);

  auto write_row = [&](const std::vector<std::string>& cells,
                       const std::vector<std::string>& extra) {
    bool first = true;
    for (std::size_t c : keep) {
      if (!first) out << delimiter;
      out << (c < cells.size() ? cells[c] : "");
      first = false;
    }
    for (const auto& cell : extra) out << delimiter << cell;
    out << '\n';
  };

  write_row(header, kAnnotationColumns);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& record = records[i];
    write_row(rows[i], {record.pathway_name.value_or(""), record.pathway_description.value_or(""),
                        record.pathway_class.value_or(""), record.pathway_map.value_or(""),
                        record.annotated() ? record.source : "unannotated"});
  }
}

RunResult run_pipeline(const PipelineConfig& config) {
  validate(config);

  std::filesystem::create_directories(config.output_dir);
  DirectoryLock lock(config.output_dir);

  const std::filesystem::path staging = config.output_dir / ".staging";
  std::filesystem::remove_all(staging);
  std::filesystem::create_directories(staging);

  // Parse and canonicalize.
  AbundanceTable raw = parse_abundance_table(config.input_path, config.feature_kind);
  SampleMetadata meta_raw = parse_metadata(config.metadata_path, config.group_column, config.covariates);
  auto [table, meta] = align_samples(raw, meta_raw);

  // Optional conversion to pathway space.
  std::string provenance = "offline annotation tables bundled with the toolkit";
  std::optional<std::filesystem::path> map_input;
  if (config.convert_ko_to_kegg &&
      (table.kind == FeatureKind::ko || table.kind == FeatureKind::unknown)) {
    const KoToPathwayMap map = load_ko_map(config.ko_map_path);
    if (!map.provenance.empty()) provenance = map.provenance;
    auto conversion = ko2kegg_abundance(table, map);
    for (const auto& match : conversion.report) {
      diag::info("pathway=" + match.pathway_id + " matched=" + std::to_string(match.matched_members) +
                 " total=" + std::to_string(match.total_members));
    }
    if (!conversion.dropped.empty()) {
      diag::info("dropped " + std::to_string(conversion.dropped.size()) +
                 " pathway(s) with no abundance");
    }
    table = std::move(conversion.table);
    if (config.ko_map_path) map_input = config.ko_map_path;
  } else if (config.convert_ko_to_kegg && table.kind != FeatureKind::kegg_pathway) {
    diag::warn(std::string("skipping KO-to-pathway conversion: input kind is ") +
               feature_kind_name(table.kind));
  }

  // Differential abundance per method.
  std::vector<std::string> artifact_names;
  std::map<std::string, std::vector<daa::DaaResultRecord>> by_method;
  for (const auto& method_name : config.methods) {
    daa::DaaConfig daa_config;
    daa_config.method = daa::method_from_name(method_name);
    daa_config.p_adjust = stats::adjust_method_from_name(config.p_adjust);
    daa_config.seed = config.seed;
    daa_config.mc_instances = config.mc_instances;
    daa_config.pseudo_count = config.pseudo_count;
    daa_config.reference_group = config.reference_group;
    auto records = daa::pathway_daa(table, meta, daa_config);
    const std::string file_name = "daa_" + method_name + ".tsv";
    std::ostringstream buffer;
    daa::write_daa_results(records, buffer);
    write_text_file(staging / file_name, buffer.str());
    artifact_names.push_back(file_name);
    by_method.emplace(method_name, std::move(records));
  }

  // Consensus per comparison family.
  std::vector<daa::ConsensusRow> consensus_rows;
  {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [method, records] : by_method) {
      for (const auto& r : records) pairs.insert({r.group1, r.group2});
    }
    for (const auto& pair : pairs) {
      std::map<std::string, std::vector<daa::DaaResultRecord>> family;
      for (const auto& [method, records] : by_method) {
        std::vector<daa::DaaResultRecord> subset;
        for (const auto& r : records) {
          if (r.group1 == pair.first && r.group2 == pair.second) subset.push_back(r);
        }
        if (!subset.empty()) family.emplace(method, std::move(subset));
      }
      if (family.empty()) continue;
      const int min_agree = std::min<int>(config.effective_min_agree(), int(family.size()));
      auto rows = daa::consensus_daa(family, config.alpha, min_agree);
      consensus_rows.insert(consensus_rows.end(), rows.begin(), rows.end());
    }
  }
  {
    std::ostringstream buffer;
    daa::write_consensus(consensus_rows, buffer);
    write_text_file(staging / "consensus.tsv", buffer.str());
    artifact_names.push_back("consensus.tsv");
  }

  // Annotation of the consensus table.
  annotate::KeggClientConfig client_config;
  client_config.enable_network = !config.no_network;
  const auto mode = annotate::annotation_mode_from_name(config.annotation_mode);
  {
    std::ostringstream buffer;
    annotate_table_file(staging / "consensus.tsv", buffer,
                        table.kind == FeatureKind::unknown ? std::optional<FeatureKind>()
                                                           : std::optional<FeatureKind>(table.kind),
                        mode, client_config, config.annotation_table_path);
    write_text_file(staging / "consensus_annotated.tsv", buffer.str());
    artifact_names.push_back("consensus_annotated.tsv");
  }

  // Figures.
  viz::PlotOptions plot_options;
  plot_options.width_px = config.plot_width;
  plot_options.height_px = config.plot_height;
  plot_options.max_features = config.max_features;
  plot_options.sort_by = viz::sort_by_from_name(config.sort_by);
  plot_options.show_error_bars = config.show_error_bars;
  plot_options.alpha = config.alpha;

  std::map<std::string, annotate::AnnotationRecord> annotations;
  {
    const auto records = annotate::annotate_features(table.feature_ids, table.kind, mode,
                                                     client_config, config.annotation_table_path);
    for (const auto& record : records) annotations.emplace(record.feature_id, record);
  }

  {
    // Error-bar panel for the first configured method's first family.
    const auto& primary = by_method.at(config.methods.front());
    if (primary.empty()) throw validation_error("primary DA method produced no records");
    const std::string g1 = primary.front().group1;
    const std::string g2 = primary.front().group2;
    std::vector<daa::DaaResultRecord> family;
    for (const auto& r : primary) {
      if (r.group1 == g1 && r.group2 == g2) family.push_back(r);
    }
    write_text_file(staging / "errorbar.svg",
                    viz::pathway_errorbar(table, meta, family, annotations, plot_options));
    artifact_names.push_back("errorbar.svg");
  }
  {
    write_text_file(staging / "pca.svg", viz::pathway_pca(table, meta, plot_options));
    artifact_names.push_back("pca.svg");
  }
  {
    std::vector<std::string> features;
    for (const auto& row : consensus_rows) {
      if (row.consensus_flag && int(features.size()) < plot_options.max_features &&
          std::find(features.begin(), features.end(), row.feature_id) == features.end()) {
        features.push_back(row.feature_id);
      }
    }
    if (features.empty()) {
      diag::warn("no consensus-flagged feature for the heatmap; using the smallest median adjusted p");
      for (const auto& row : consensus_rows) {
        if (int(features.size()) < plot_options.max_features &&
            std::find(features.begin(), features.end(), row.feature_id) == features.end()) {
          features.push_back(row.feature_id);
        }
      }
    }
    write_text_file(staging / "heatmap.svg",
                    viz::pathway_heatmap(table, meta, features, plot_options));
    artifact_names.push_back("heatmap.svg");
  }

  // Manifest with checksums of inputs and artifacts.
  {
    std::vector<std::pair<std::string, std::filesystem::path>> inputs = {
        {"abundance", config.input_path}, {"metadata", config.metadata_path}};
    if (map_input) inputs.emplace_back("ko_map", *map_input);
    std::vector<std::pair<std::string, std::filesystem::path>> artifacts;
    for (const auto& name : artifact_names) artifacts.emplace_back(name, staging / name);
    write_text_file(staging / "manifest.json",
                    build_manifest(config, inputs, artifacts, provenance));
    artifact_names.push_back("manifest.json");
  }

  // Promote atomically: every artifact is complete before any lands in the
  // output directory.
  for (const auto& name : artifact_names) {
    const auto target = config.output_dir / name;
    std::filesystem::remove(target);
    std::filesystem::rename(staging / name, target);
  }
  std::filesystem::remove_all(staging);

  RunResult result;
  result.output_dir = config.output_dir;
  result.artifacts = artifact_names;
  return result;
}

}  // namespace picrustkit::pipeline
