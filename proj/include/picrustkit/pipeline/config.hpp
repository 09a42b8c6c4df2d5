#ifndef PICRUSTKIT_PIPELINE_CONFIG_HPP
#define PICRUSTKIT_PIPELINE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "picrustkit/io/abundance_table.hpp"

namespace picrustkit::pipeline {

// Everything the end-to-end run needs. Loadable from a flat 'key = value'
// file with '#' comments; command-line flags override file values.
struct PipelineConfig {
  std::filesystem::path input_path;
  std::filesystem::path metadata_path;
  std::string group_column;
  std::optional<FeatureKind> feature_kind;
  bool convert_ko_to_kegg = true;
  std::vector<std::string> methods = {"aldex2", "linda", "welch_t", "wilcoxon"};
  std::string p_adjust = "BH";
  double alpha = 0.05;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "picrustkit-out";
  std::string annotation_mode = "offline";
  std::optional<std::string> reference_group;
  std::vector<std::string> covariates;
  int mc_instances = 128;
  double pseudo_count = 0.5;
  int min_agree = 0;  // 0: ceil(methods/2)

  // plot options subset
  int plot_width = 1000;
  int plot_height = 700;
  int max_features = 30;
  std::string sort_by = "class_then_p";
  bool show_error_bars = true;

  bool no_network = false;
  std::optional<std::filesystem::path> ko_map_path;
  std::optional<std::filesystem::path> annotation_table_path;

  int effective_min_agree() const {
    return min_agree > 0 ? min_agree : int((methods.size() + 1) / 2);
  }
};

// Throws validation_error on out-of-range or inconsistent settings.
void validate(const PipelineConfig& config);

// Parses a config file into `config` (later keys win). Unknown keys are hard
// errors so typos do not silently change a run.
void load_config_file(const std::filesystem::path& path, PipelineConfig& config);
void apply_config_key(PipelineConfig& config, const std::string& key, const std::string& value);

}  // namespace picrustkit::pipeline

#endif  // PICRUSTKIT_PIPELINE_CONFIG_HPP
