#ifndef PICRUSTKIT_VIZ_PLOTS_HPP
#define PICRUSTKIT_VIZ_PLOTS_HPP

#include <map>
#include <string>
#include <vector>

#include "picrustkit/annotate/annotation.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/io/abundance_table.hpp"

namespace picrustkit::viz {

enum class SortBy { adjusted_p, class_then_p, effect };

SortBy sort_by_from_name(const std::string& name);

struct PlotOptions {
  int width_px = 1000;
  int height_px = 700;
  std::string palette = "okabe_ito";
  std::string font_family = "Helvetica, Arial, sans-serif";
  int max_features = 30;
  SortBy sort_by = SortBy::adjusted_p;
  bool show_error_bars = true;  // false reproduces the plain bar plot
  double alpha = 0.05;          // significance cutoff for feature selection
};

void validate(const PlotOptions& options);

// One row per selected feature: group-colored mean relative-abundance bars
// with standard-error whiskers, a log2 fold-change dot-and-line column, and
// the adjusted p. Rows group under pathway-class headers when sort_by is
// class_then_p. daa_results must hold exactly one comparison family.
std::string pathway_errorbar(const AbundanceTable& table, const SampleMetadata& meta,
                             const std::vector<daa::DaaResultRecord>& daa_results,
                             const std::map<std::string, annotate::AnnotationRecord>& annotations,
                             const PlotOptions& options);

// PC1/PC2 scatter colored by group with per-group Gaussian-KDE margin
// densities (256-point grid).
std::string pathway_pca(const AbundanceTable& table, const SampleMetadata& meta,
                        const PlotOptions& options);

// Per-feature z-scores across all samples, columns grouped by metadata group,
// diverging scale symmetric about zero and clipped at +/-3.
std::string pathway_heatmap(const AbundanceTable& table, const SampleMetadata& meta,
                            const std::vector<std::string>& features, const PlotOptions& options);

}  // namespace picrustkit::viz

#endif  // PICRUSTKIT_VIZ_PLOTS_HPP
