#include "picrustkit/annotate/annotation.hpp"

#include <fstream>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/kegg/ko_pathway_map.hpp"

namespace picrustkit::annotate {

std::string AnnotationRecord::class_group() const {
  if (!pathway_class) return "Unclassified";
  const auto pos = pathway_class->find(';');
  return std::string(text::trim(pathway_class->substr(0, pos)));
}

const char* annotation_mode_name(AnnotationMode mode) {
  switch (mode) {
    case AnnotationMode::offline: return "offline";
    case AnnotationMode::kegg_rest: return "kegg_rest";
    default: return "auto";
  }
}

AnnotationMode annotation_mode_from_name(const std::string& name) {
  if (name == "offline") return AnnotationMode::offline;
  if (name == "kegg_rest") return AnnotationMode::kegg_rest;
  if (name == "auto") return AnnotationMode::auto_mode;
  throw validation_error("unknown annotation mode '" + name +
                         "' (expected offline, kegg_rest, or auto)");
}

namespace {

const char* bundled_table_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::ko: return "ko.tsv";
    case FeatureKind::ec: return "ec.tsv";
    case FeatureKind::metacyc: return "metacyc.tsv";
    case FeatureKind::kegg_pathway: return "kegg_pathway.tsv";
    default: return nullptr;
  }
}

}  // namespace

std::map<std::string, AnnotationRecord> load_annotation_table(
    FeatureKind kind, const std::optional<std::filesystem::path>& path) {
  std::filesystem::path file;
  if (path) {
    file = *path;
  } else {
    const char* name = bundled_table_name(kind);
    if (!name) {
      throw validation_error("no bundled annotation table for kind UNKNOWN; pass a table path");
    }
    file = default_data_dir() / "annotations" / name;
  }
  std::ifstream in(file);
  if (!in) throw validation_error("cannot open annotation table '" + file.string() + "'");

  std::map<std::string, AnnotationRecord> table;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = text::split(line, '\t');
    if (cells.empty() || text::trim(cells[0]).empty()) {
      throw validation_error(file.string() + ": line " + std::to_string(line_number) +
                             ": missing feature id");
    }
    cells.resize(5);  // pad missing trailing columns
    AnnotationRecord record;
    record.feature_id = std::string(text::trim(cells[0]));
    auto field = [&](const std::string& cell) -> std::optional<std::string> {
      auto trimmed = text::trim(cell);
      if (trimmed.empty()) return std::nullopt;
      return std::string(trimmed);
    };
    record.pathway_name = field(cells[1]);
    record.pathway_description = field(cells[2]);
    record.pathway_class = field(cells[3]);
    record.pathway_map = field(cells[4]);
    record.source = "offline";
    if (table.count(record.feature_id)) {
      diag::warn("annotation table: duplicate id '" + record.feature_id + "'; keeping the last entry");
    }
    table[record.feature_id] = std::move(record);
  }
  return table;
}

std::vector<AnnotationRecord> annotate_features(const std::vector<std::string>& ids, FeatureKind kind,
                                                AnnotationMode mode,
                                                const KeggClientConfig& client_config,
                                                const std::optional<std::filesystem::path>& table_path) {
  if (mode == AnnotationMode::kegg_rest && kind != FeatureKind::kegg_pathway) {
    throw validation_error(std::string("kegg_rest annotation only supports KEGG pathways, not ") +
                           feature_kind_name(kind));
  }

  std::map<std::string, AnnotationRecord> offline;
  if (mode == AnnotationMode::kegg_rest) {
    // The offline table doubles as the network-failure fallback.
    try {
      offline = load_annotation_table(kind, table_path);
    } catch (const validation_error&) {
      offline.clear();
    }
  } else {
    offline = load_annotation_table(kind, table_path);
  }

  const bool may_fetch = (mode == AnnotationMode::kegg_rest ||
                          (mode == AnnotationMode::auto_mode && kind == FeatureKind::kegg_pathway)) &&
                         client_config.enable_network && !network_disabled_by_env();

  std::optional<KeggClient> client;
  if (may_fetch) client.emplace(client_config, &offline);
  if (mode == AnnotationMode::kegg_rest && !client) {
    diag::warn("kegg_rest annotation requested but networking is disabled; using offline tables");
  }

  std::vector<AnnotationRecord> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = offline.find(id);
    const bool offline_hit = it != offline.end() && it->second.annotated();

    const bool fetch = client && (mode == AnnotationMode::kegg_rest ||
                                  (mode == AnnotationMode::auto_mode && !offline_hit));
    if (fetch) {
      out.push_back(client->fetch(id));
    } else if (offline_hit) {
      out.push_back(it->second);
    } else {
      AnnotationRecord record;
      record.feature_id = id;
      record.source = "offline";
      out.push_back(std::move(record));
    }
  }
  return out;
}

}  // namespace picrustkit::annotate
