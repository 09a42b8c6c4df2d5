#include <algorithm>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "picrustkit/annotate/annotation.hpp"
#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/io/table_io.hpp"
#include "picrustkit/kegg/ko_pathway_map.hpp"
#include "picrustkit/pipeline/config.hpp"
#include "picrustkit/pipeline/manifest.hpp"
#include "picrustkit/pipeline/run.hpp"
#include "picrustkit/viz/plots.hpp"

#include <CLI11.hpp>

namespace {

using namespace picrustkit;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

std::string data_provenance_summary() {
  std::string summary;
  const auto map_path = default_data_dir() / "ko_pathway_map.tsv";
  std::ifstream in(map_path);
  std::string line;
  while (std::getline(in, line)) {
    if (text::starts_with(line, "# provenance:")) {
      summary = std::string(text::trim(line.substr(std::string("# provenance:").size() + 1)));
      break;
    }
    if (!line.empty() && line[0] != '#') break;
  }
  return summary.empty() ? "reference data: " + default_data_dir().string()
                         : "reference data: " + summary;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write '" + path.string() + "'");
  out << content;
}

std::optional<FeatureKind> parse_kind_flag(const std::string& kind) {
  if (kind.empty()) return std::nullopt;
  return feature_kind_from_name(kind);
}

struct CommonTableArgs {
  std::string input;
  std::string metadata;
  std::string group_column;
  std::string kind;

  std::pair<AbundanceTable, SampleMetadata> load(const std::vector<std::string>& covariates = {}) const {
    AbundanceTable table = parse_abundance_table(input, parse_kind_flag(kind));
    SampleMetadata meta = parse_metadata(metadata, group_column, covariates);
    return align_samples(table, meta);
  }
};

int cmd_convert(const std::string& input, const std::string& output, const std::string& map_path,
                const std::string& kind) {
  AbundanceTable table = parse_abundance_table(input, parse_kind_flag(kind));
  const KoToPathwayMap map =
      load_ko_map(map_path.empty() ? std::optional<std::filesystem::path>()
                                   : std::optional<std::filesystem::path>(map_path));
  const auto result = ko2kegg_abundance(table, map);
  for (const auto& match : result.report) {
    diag::info("pathway=" + match.pathway_id + " matched=" + std::to_string(match.matched_members) +
               " total=" + std::to_string(match.total_members));
  }
  if (!result.dropped.empty()) {
    diag::info("dropped=" + std::to_string(result.dropped.size()) +
               " pathways with no member abundance");
  }
  std::ostringstream buffer;
  write_abundance_table(result.table, buffer);
  write_file(output, buffer.str());
  diag::info("wrote " + output + " (" + std::to_string(result.table.n_features()) + " pathways x " +
             std::to_string(result.table.n_samples()) + " samples)");
  return kExitOk;
}

int cmd_daa(const CommonTableArgs& common, const std::vector<std::string>& methods,
            const std::string& p_adjust, double alpha, std::uint64_t seed, bool seed_given,
            int mc_instances, double pseudo_count, const std::string& reference_group,
            const std::vector<std::string>& covariates, int min_agree,
            const std::string& output_dir) {
  auto [table, meta] = common.load(covariates);

  for (const auto& name : methods) daa::method_from_name(name);
  if (!seed_given &&
      std::find(methods.begin(), methods.end(), "aldex2") != methods.end()) {
    diag::warn("aldex2 requested without --seed; defaulting to seed=42");
  }

  std::filesystem::create_directories(output_dir);
  std::map<std::string, std::vector<daa::DaaResultRecord>> by_method;
  for (const auto& name : methods) {
    daa::DaaConfig config;
    config.method = daa::method_from_name(name);
    config.p_adjust = stats::adjust_method_from_name(p_adjust);
    config.seed = seed;
    config.mc_instances = mc_instances;
    config.pseudo_count = pseudo_count;
    if (!reference_group.empty()) config.reference_group = reference_group;
    auto records = daa::pathway_daa(table, meta, config);
    std::ostringstream buffer;
    daa::write_daa_results(records, buffer);
    const auto path = std::filesystem::path(output_dir) / ("daa_" + name + ".tsv");
    write_file(path, buffer.str());
    diag::info("wrote " + path.string());
    by_method.emplace(name, std::move(records));
  }

  if (methods.size() >= 2) {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [name, records] : by_method) {
      for (const auto& r : records) pairs.insert({r.group1, r.group2});
    }
    std::vector<daa::ConsensusRow> rows;
    for (const auto& pair : pairs) {
      std::map<std::string, std::vector<daa::DaaResultRecord>> family;
      for (const auto& [name, records] : by_method) {
        std::vector<daa::DaaResultRecord> subset;
        for (const auto& r : records) {
          if (r.group1 == pair.first && r.group2 == pair.second) subset.push_back(r);
        }
        if (!subset.empty()) family.emplace(name, std::move(subset));
      }
      if (family.empty()) continue;
      const int effective = min_agree > 0 ? std::min<int>(min_agree, int(family.size()))
                                          : int((family.size() + 1) / 2);
      auto family_rows = daa::consensus_daa(family, alpha, effective);
      rows.insert(rows.end(), family_rows.begin(), family_rows.end());
    }
    std::ostringstream buffer;
    daa::write_consensus(rows, buffer);
    const auto path = std::filesystem::path(output_dir) / "consensus.tsv";
    write_file(path, buffer.str());
    diag::info("wrote " + path.string());
  }
  return kExitOk;
}

int cmd_annotate(const std::string& input, const std::string& output, const std::string& kind,
                 const std::string& mode, const std::string& table_path,
                 const std::string& cache_dir, const std::string& base_url, bool no_network) {
  annotate::KeggClientConfig client_config;
  if (!cache_dir.empty()) client_config.cache_dir = cache_dir;
  if (!base_url.empty()) client_config.base_url = base_url;
  client_config.enable_network = !no_network;

  std::ostringstream buffer;
  pipeline::annotate_table_file(input, buffer, parse_kind_flag(kind),
                                annotate::annotation_mode_from_name(mode), client_config,
                                table_path.empty()
                                    ? std::optional<std::filesystem::path>()
                                    : std::optional<std::filesystem::path>(table_path));
  write_file(output, buffer.str());
  diag::info("wrote " + output);
  return kExitOk;
}

viz::PlotOptions make_plot_options(int width, int height, int max_features,
                                   const std::string& sort_by, bool no_error_bars, double alpha) {
  viz::PlotOptions options;
  options.width_px = width;
  options.height_px = height;
  options.max_features = max_features;
  options.sort_by = viz::sort_by_from_name(sort_by);
  options.show_error_bars = !no_error_bars;
  options.alpha = alpha;
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathway differential-abundance analysis and figures for "
               "PICRUSt2-style functional profiles"};
  app.require_subcommand(1);
  app.fallthrough();

  bool quiet = false;
  bool no_network = false;
  app.add_flag("--quiet", quiet, "Silence info and warning logs");
  app.add_flag("--no-network", no_network,
               "Never touch the network (mirrors PICRUSTKIT_NO_NETWORK)");
  app.set_version_flag("--version", [] {
    return "picrustkit " + pipeline::tool_version() + "\n" + data_provenance_summary();
  });

  // convert
  auto* convert = app.add_subcommand("convert", "Sum a KO table into KEGG pathway abundances");
  std::string cv_input, cv_output, cv_map, cv_kind;
  convert->add_option("-i,--input", cv_input, "KO abundance table (TSV/CSV/TXT)")->required();
  convert->add_option("-o,--output", cv_output, "Output pathway TSV")->required();
  convert->add_option("--map", cv_map, "Custom KO-to-pathway map (default: bundled snapshot)");
  convert->add_option("--kind", cv_kind, "Feature kind hint (KO, EC, MetaCyc, KEGG_PATHWAY)");

  // daa
  auto* daa_cmd = app.add_subcommand("daa", "Differential abundance across groups");
  CommonTableArgs daa_args;
  std::vector<std::string> daa_methods = {"welch_t"};
  std::string daa_p_adjust = "BH", daa_reference, daa_output_dir = ".";
  std::vector<std::string> daa_covariates;
  double daa_alpha = 0.05, daa_pseudo = 0.5;
  std::uint64_t daa_seed = 42;
  int daa_mc = 128, daa_min_agree = 0;
  daa_cmd->add_option("-i,--input", daa_args.input, "Abundance table")->required();
  daa_cmd->add_option("-m,--metadata", daa_args.metadata, "Sample metadata")->required();
  daa_cmd->add_option("-g,--group-column", daa_args.group_column, "Metadata group column")
      ->required();
  daa_cmd->add_option("--kind", daa_args.kind, "Feature kind hint");
  daa_cmd->add_option("--methods", daa_methods,
                      "Comma-separated DA methods (" + text::join(daa::method_names(), ", ") + ")")
      ->delimiter(',');
  daa_cmd->add_option("--p-adjust", daa_p_adjust, "BH, holm, bonferroni, BY, or none");
  daa_cmd->add_option("--alpha", daa_alpha, "Significance level for the consensus table");
  auto* seed_opt = daa_cmd->add_option("--seed", daa_seed, "RNG seed (required for aldex2)");
  daa_cmd->add_option("--mc-instances", daa_mc, "Monte Carlo instances for aldex2");
  daa_cmd->add_option("--pseudo-count", daa_pseudo, "Pseudo-count added before log transforms");
  daa_cmd->add_option("--reference-group", daa_reference, "Compare this group against the others");
  daa_cmd->add_option("--covariates", daa_covariates, "Numeric metadata covariates (linda)")
      ->delimiter(',');
  daa_cmd->add_option("--min-agree", daa_min_agree,
                      "Methods that must agree for a consensus flag (default: half, rounded up)");
  daa_cmd->add_option("--output-dir", daa_output_dir, "Where result TSVs are written");

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "Attach names, classes, and map ids");
  std::string an_input, an_output, an_kind, an_mode = "offline", an_table, an_cache, an_base_url;
  annotate_cmd->add_option("-i,--input", an_input, "Abundance table or DA results TSV")->required();
  annotate_cmd->add_option("-o,--output", an_output, "Annotated TSV")->required();
  annotate_cmd->add_option("--kind", an_kind, "Feature kind (default: inferred from ids)");
  annotate_cmd->add_option("--mode", an_mode, "offline, kegg_rest, or auto");
  annotate_cmd->add_option("--table", an_table, "Custom annotation table");
  annotate_cmd->add_option("--cache-dir", an_cache, "KEGG response cache directory");
  annotate_cmd->add_option("--base-url", an_base_url, "KEGG endpoint override");

  // plot
  auto* plot = app.add_subcommand("plot", "Render figures");
  plot->require_subcommand(1);
  int plot_width = 1000, plot_height = 700, plot_max_features = 30;
  double plot_alpha = 0.05;
  std::string plot_sort = "adjusted_p";
  bool plot_no_error_bars = false;

  auto* errorbar = plot->add_subcommand("errorbar", "Per-feature abundance and fold-change panel");
  CommonTableArgs eb_args;
  std::string eb_daa, eb_output, eb_mode = "offline", eb_table, eb_group1, eb_group2;
  errorbar->add_option("-i,--input", eb_args.input, "Abundance table")->required();
  errorbar->add_option("-m,--metadata", eb_args.metadata, "Sample metadata")->required();
  errorbar->add_option("-g,--group-column", eb_args.group_column, "Metadata group column")
      ->required();
  errorbar->add_option("--kind", eb_args.kind, "Feature kind hint");
  errorbar->add_option("--daa", eb_daa, "DA results TSV for one method")->required();
  errorbar->add_option("-o,--output", eb_output, "Output SVG")->required();
  errorbar->add_option("--mode", eb_mode, "Annotation mode");
  errorbar->add_option("--table", eb_table, "Custom annotation table");
  errorbar->add_option("--group1", eb_group1, "Restrict to this comparison (with --group2)");
  errorbar->add_option("--group2", eb_group2, "Restrict to this comparison (with --group1)");
  errorbar->add_option("--alpha", plot_alpha, "Adjusted-p cutoff for feature selection");
  errorbar->add_option("--max-features", plot_max_features, "Feature cap");
  errorbar->add_option("--sort-by", plot_sort, "adjusted_p, class_then_p, or effect");
  errorbar->add_flag("--no-error-bars", plot_no_error_bars, "Plain bars without whiskers");
  errorbar->add_option("--width", plot_width, "Width in px");
  errorbar->add_option("--height", plot_height, "Height in px");

  auto* pca = plot->add_subcommand("pca", "PC1/PC2 scatter with group densities");
  CommonTableArgs pca_args;
  std::string pca_output;
  pca->add_option("-i,--input", pca_args.input, "Abundance table")->required();
  pca->add_option("-m,--metadata", pca_args.metadata, "Sample metadata")->required();
  pca->add_option("-g,--group-column", pca_args.group_column, "Metadata group column")->required();
  pca->add_option("--kind", pca_args.kind, "Feature kind hint");
  pca->add_option("-o,--output", pca_output, "Output SVG")->required();
  pca->add_option("--width", plot_width, "Width in px");
  pca->add_option("--height", plot_height, "Height in px");

  auto* heatmap = plot->add_subcommand("heatmap", "Grouped z-score heatmap");
  CommonTableArgs hm_args;
  std::string hm_output;
  std::vector<std::string> hm_features;
  heatmap->add_option("-i,--input", hm_args.input, "Abundance table")->required();
  heatmap->add_option("-m,--metadata", hm_args.metadata, "Sample metadata")->required();
  heatmap->add_option("-g,--group-column", hm_args.group_column, "Metadata group column")
      ->required();
  heatmap->add_option("--kind", hm_args.kind, "Feature kind hint");
  heatmap->add_option("--features", hm_features, "Features to render")->required()->delimiter(',');
  heatmap->add_option("-o,--output", hm_output, "Output SVG")->required();
  heatmap->add_option("--width", plot_width, "Width in px");
  heatmap->add_option("--height", plot_height, "Height in px");

  // run
  auto* run = app.add_subcommand("run", "End-to-end pipeline: parse, convert, test, annotate, plot");
  std::string run_config_file;
  run->add_option("--config", run_config_file, "Flat key = value configuration file");
  std::deque<std::string> run_storage;  // stable addresses for CLI11 bindings
  std::vector<std::pair<std::string, std::string*>> run_flags;
  auto add_run_override = [&](const std::string& flag, const std::string& key,
                              const std::string& help) {
    run_storage.emplace_back();
    run_flags.emplace_back(key, &run_storage.back());
    run->add_option(flag, run_storage.back(), help);
  };
  add_run_override("-i,--input", "input", "Abundance table");
  add_run_override("-m,--metadata", "metadata", "Sample metadata");
  add_run_override("-g,--group-column", "group_column", "Metadata group column");
  add_run_override("--kind", "feature_kind", "Feature kind hint");
  add_run_override("--convert", "convert_ko_to_kegg", "Convert KO input to pathways (true/false)");
  add_run_override("--methods", "methods", "Comma-separated DA methods");
  add_run_override("--p-adjust", "p_adjust", "Multiple-testing correction");
  add_run_override("--alpha", "alpha", "Significance level");
  add_run_override("--seed", "seed", "RNG seed");
  add_run_override("--output-dir", "output_dir", "Artifact directory");
  add_run_override("--annotation-mode", "annotation_mode", "offline, kegg_rest, or auto");
  add_run_override("--reference-group", "reference_group", "Reference group");
  add_run_override("--covariates", "covariates", "Numeric covariate columns");
  add_run_override("--mc-instances", "mc_instances", "Monte Carlo instances for aldex2");
  add_run_override("--pseudo-count", "pseudo_count", "Pseudo-count");
  add_run_override("--min-agree", "min_agree", "Consensus agreement threshold");
  add_run_override("--max-features", "max_features", "Plot feature cap");
  add_run_override("--sort-by", "sort_by", "Error-bar row order");
  add_run_override("--show-error-bars", "show_error_bars", "true/false");
  add_run_override("--plot-width", "plot_width", "Figure width in px");
  add_run_override("--plot-height", "plot_height", "Figure height in px");
  add_run_override("--map", "ko_map", "Custom KO-to-pathway map");
  add_run_override("--annotation-table", "annotation_table", "Custom annotation table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  diag::set_quiet(quiet);
  if (no_network) setenv("PICRUSTKIT_NO_NETWORK", "1", 1);

  try {
    if (convert->parsed()) return cmd_convert(cv_input, cv_output, cv_map, cv_kind);
    if (daa_cmd->parsed()) {
      return cmd_daa(daa_args, daa_methods, daa_p_adjust, daa_alpha, daa_seed,
                     seed_opt->count() > 0, daa_mc, daa_pseudo, daa_reference, daa_covariates,
                     daa_min_agree, daa_output_dir);
    }
    if (annotate_cmd->parsed()) {
      return cmd_annotate(an_input, an_output, an_kind, an_mode, an_table, an_cache, an_base_url,
                          no_network);
    }
    if (plot->parsed()) {
      const auto options = make_plot_options(plot_width, plot_height, plot_max_features, plot_sort,
                                             plot_no_error_bars, plot_alpha);
      if (errorbar->parsed()) {
        auto [table, meta] = eb_args.load();
        auto records = pipeline::read_daa_results(eb_daa);
        if (!eb_group1.empty() || !eb_group2.empty()) {
          std::vector<daa::DaaResultRecord> filtered;
          for (const auto& r : records) {
            if ((eb_group1.empty() || r.group1 == eb_group1) &&
                (eb_group2.empty() || r.group2 == eb_group2)) {
              filtered.push_back(r);
            }
          }
          records = std::move(filtered);
        }
        annotate::KeggClientConfig client_config;
        client_config.enable_network = !no_network;
        std::map<std::string, annotate::AnnotationRecord> annotations;
        for (const auto& record : annotate::annotate_features(
                 table.feature_ids, table.kind, annotate::annotation_mode_from_name(eb_mode),
                 client_config,
                 eb_table.empty() ? std::optional<std::filesystem::path>()
                                  : std::optional<std::filesystem::path>(eb_table))) {
          annotations.emplace(record.feature_id, record);
        }
        write_file(eb_output, viz::pathway_errorbar(table, meta, records, annotations, options));
        diag::info("wrote " + eb_output);
      } else if (pca->parsed()) {
        auto [table, meta] = pca_args.load();
        write_file(pca_output, viz::pathway_pca(table, meta, options));
        diag::info("wrote " + pca_output);
      } else if (heatmap->parsed()) {
        auto [table, meta] = hm_args.load();
        write_file(hm_output, viz::pathway_heatmap(table, meta, hm_features, options));
        diag::info("wrote " + hm_output);
      }
      return kExitOk;
    }
    if (run->parsed()) {
      pipeline::PipelineConfig config;
      if (!run_config_file.empty()) pipeline::load_config_file(run_config_file, config);
      for (const auto& [key, storage] : run_flags) {
        if (!storage->empty()) pipeline::apply_config_key(config, key, *storage);
      }
      if (no_network) config.no_network = true;
      const auto result = pipeline::run_pipeline(config);
      for (const auto& name : result.artifacts) {
        diag::info("artifact " + (result.output_dir / name).string());
      }
      return kExitOk;
    }
  } catch (const validation_error& e) {
    diag::error(e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    diag::error(std::string("internal error: ") + e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
