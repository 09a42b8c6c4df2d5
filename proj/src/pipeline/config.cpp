#include "picrustkit/pipeline/config.hpp"

#include <fstream>

#include "picrustkit/annotate/annotation.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/stats/p_adjust.hpp"
#include "picrustkit/viz/plots.hpp"

namespace picrustkit::pipeline {

void validate(const PipelineConfig& config) {
  if (config.input_path.empty()) throw validation_error("config: input path is required");
  if (config.metadata_path.empty()) throw validation_error("config: metadata path is required");
  if (config.group_column.empty()) throw validation_error("config: group_column is required");
  if (config.methods.empty()) throw validation_error("config: at least one DA method is required");
  for (const auto& m : config.methods) daa::method_from_name(m);
  stats::adjust_method_from_name(config.p_adjust);
  annotate::annotation_mode_from_name(config.annotation_mode);
  viz::sort_by_from_name(config.sort_by);
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw validation_error("config: alpha must be in (0,1)");
  }
  if (config.mc_instances < 2) throw validation_error("config: mc_instances must be >= 2");
  if (config.pseudo_count < 0.0) throw validation_error("config: pseudo_count must be >= 0");
  if (config.min_agree < 0 || std::size_t(config.min_agree) > config.methods.size()) {
    throw validation_error("config: min_agree must be in [1, number of methods]");
  }
  if (config.max_features < 1) throw validation_error("config: max_features must be positive");
  if (config.plot_width < 100 || config.plot_height < 100) {
    throw validation_error("config: plot size must be at least 100x100");
  }
  if (config.output_dir.empty()) throw validation_error("config: output_dir is required");
}

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw validation_error("config: key '" + key + "' expects a boolean, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  const auto parsed = text::parse_double(value);
  if (!parsed) throw validation_error("config: key '" + key + "' expects a number, got '" + value + "'");
  return *parsed;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  const auto parsed = text::parse_u64(value);
  if (!parsed) {
    throw validation_error("config: key '" + key + "' expects a non-negative integer, got '" +
                           value + "'");
  }
  return *parsed;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : text::split(value, ',')) {
    const auto trimmed = text::trim(item);
    if (!trimmed.empty()) out.emplace_back(trimmed);
  }
  return out;
}

}  // namespace

void apply_config_key(PipelineConfig& config, const std::string& key, const std::string& value) {
  if (key == "input") config.input_path = value;
  else if (key == "metadata") config.metadata_path = value;
  else if (key == "group_column") config.group_column = value;
  else if (key == "feature_kind") config.feature_kind = feature_kind_from_name(value);
  else if (key == "convert_ko_to_kegg") config.convert_ko_to_kegg = parse_bool(key, value);
  else if (key == "methods") config.methods = parse_list(value);
  else if (key == "p_adjust") config.p_adjust = value;
  else if (key == "alpha") config.alpha = parse_real(key, value);
  else if (key == "seed") config.seed = parse_unsigned(key, value);
  else if (key == "output_dir") config.output_dir = value;
  else if (key == "annotation_mode") config.annotation_mode = value;
  else if (key == "reference_group") config.reference_group = value;
  else if (key == "covariates") config.covariates = parse_list(value);
  else if (key == "mc_instances") config.mc_instances = int(parse_unsigned(key, value));
  else if (key == "pseudo_count") config.pseudo_count = parse_real(key, value);
  else if (key == "min_agree") config.min_agree = int(parse_unsigned(key, value));
  else if (key == "plot_width") config.plot_width = int(parse_unsigned(key, value));
  else if (key == "plot_height") config.plot_height = int(parse_unsigned(key, value));
  else if (key == "max_features") config.max_features = int(parse_unsigned(key, value));
  else if (key == "sort_by") config.sort_by = value;
  else if (key == "show_error_bars") config.show_error_bars = parse_bool(key, value);
  else if (key == "no_network") config.no_network = parse_bool(key, value);
  else if (key == "ko_map") config.ko_map_path = value;
  else if (key == "annotation_table") config.annotation_table_path = value;
  else throw validation_error("config: unknown key '" + key + "'");
}

void load_config_file(const std::filesystem::path& path, PipelineConfig& config) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw validation_error(path.string() + ": line " + std::to_string(line_number) +
                             ": expected 'key = value'");
    }
    const std::string key = std::string(text::trim(trimmed.substr(0, eq)));
    const std::string value = std::string(text::trim(trimmed.substr(eq + 1)));
    try {
      apply_config_key(config, key, value);
    } catch (const validation_error& e) {
      throw validation_error(path.string() + ": line " + std::to_string(line_number) + ": " +
                             e.what());
    }
  }
}

}  // namespace picrustkit::pipeline
