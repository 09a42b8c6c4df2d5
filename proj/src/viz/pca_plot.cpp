#include <algorithm>
#include <cmath>

#include "picrustkit/compositions.hpp"
#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/stats/kde.hpp"
#include "picrustkit/viz/pca.hpp"
#include "picrustkit/viz/plots.hpp"
#include "picrustkit/viz/svg.hpp"

namespace picrustkit::viz {

namespace {

struct Range {
  double lo, hi;
  double span() const { return hi - lo; }
};

Range padded_range(const Eigen::VectorXd& v) {
  Range r{v.minCoeff(), v.maxCoeff()};
  double pad = r.span() * 0.08;
  if (pad <= 0.0) pad = std::max(1.0, std::fabs(r.lo)) * 0.1;
  return {r.lo - pad, r.hi + pad};
}

}  // namespace

std::string pathway_pca(const AbundanceTable& table, const SampleMetadata& meta,
                        const PlotOptions& options) {
  validate(options);
  if (table.sample_ids != meta.sample_ids) {
    throw validation_error("pathway_pca: table and metadata must be aligned");
  }
  if (table.n_samples() < 3) throw validation_error("pathway_pca: at least 3 samples required");

  const Eigen::MatrixXd relative = relative_abundance(table.values, &table.sample_ids);
  const PcaResult pca = compute_pca(relative, 2, /*scale=*/false);
  const daa::GroupPartition part = daa::partition_by_group(meta);
  const auto& palette = palette_colors(options.palette);

  const Range x_range = padded_range(pca.scores.col(0));
  const Range y_range = padded_range(pca.scores.col(1));

  // Main panel plus top/right density margins.
  const double margin_left = 56.0, margin_bottom = 46.0, margin_gap = 6.0;
  const double density_size = 70.0;
  const double plot_w = options.width_px - margin_left - density_size - margin_gap - 10.0;
  const double plot_h = options.height_px - margin_bottom - density_size - margin_gap - 10.0;
  const double plot_x = margin_left;
  const double plot_y = density_size + margin_gap;

  auto to_px_x = [&](double v) { return plot_x + (v - x_range.lo) / x_range.span() * plot_w; };
  auto to_px_y = [&](double v) { return plot_y + plot_h - (v - y_range.lo) / y_range.span() * plot_h; };

  SvgDocument doc(options.width_px, options.height_px);
  auto& root = doc.root();
  root.attr("font-family", options.font_family);

  root.child("rect")
      .attr("x", plot_x)
      .attr("y", plot_y)
      .attr("width", plot_w)
      .attr("height", plot_h)
      .attr("fill", "none")
      .attr("stroke", "#444444")
      .attr("stroke-width", 1.0, 1);

  // Axis labels carry the explained-variance percentages.
  const double pct1 = pca.explained_variance_ratio[0] * 100.0;
  const double pct2 = pca.explained_variance_ratio[1] * 100.0;
  {
    auto& t = root.child("text");
    t.attr("x", plot_x + plot_w / 2.0)
        .attr("y", plot_y + plot_h + 34.0)
        .attr("font-size", 12.0, 1)
        .attr("text-anchor", "middle");
    t.text("PC1 (" + text::format_fixed(pct1, 1) + "%)");
  }
  {
    auto& t = root.child("text");
    t.attr("x", 16.0)
        .attr("y", plot_y + plot_h / 2.0)
        .attr("font-size", 12.0, 1)
        .attr("text-anchor", "middle")
        .attr("transform", "rotate(-90 16," + text::format_fixed(plot_y + plot_h / 2.0, 2) + ")");
    t.text("PC2 (" + text::format_fixed(pct2, 1) + "%)");
  }

  // Per-group margin densities (256-point Gaussian KDE).
  auto density_path = [&](const Eigen::VectorXd& values, const Range& range, bool horizontal,
                          double base, double thickness) -> std::string {
    const double bw = stats::silverman_bandwidth(values);
    if (!(bw > 0.0)) return {};
    const auto curve = stats::kde_on_grid(values, range.lo, range.hi, 256, bw);
    const double peak = curve.density.maxCoeff();
    if (!(peak > 0.0)) return {};
    std::string d;
    for (Eigen::Index g = 0; g < curve.grid.size(); ++g) {
      const double frac = curve.density[g] / peak;
      double px, py;
      if (horizontal) {
        px = to_px_x(curve.grid[g]);
        py = base - frac * thickness;
      } else {
        px = base + frac * thickness;
        py = to_px_y(curve.grid[g]);
      }
      d += (g == 0 ? "M" : " L") + text::format_fixed(px, 2) + " " + text::format_fixed(py, 2);
    }
    return d;
  };

  auto& densities = root.child("g");
  densities.attr("fill", "none").attr("stroke-width", 1.4, 1);
  for (std::size_t g = 0; g < part.labels.size(); ++g) {
    Eigen::VectorXd pc1(Eigen::Index(part.members[g].size()));
    Eigen::VectorXd pc2(Eigen::Index(part.members[g].size()));
    for (std::size_t k = 0; k < part.members[g].size(); ++k) {
      pc1[Eigen::Index(k)] = pca.scores(part.members[g][k], 0);
      pc2[Eigen::Index(k)] = pca.scores(part.members[g][k], 1);
    }
    const std::string& color = palette[g % palette.size()];
    if (part.members[g].size() < 2) {
      diag::warn("pathway_pca: group '" + part.labels[g] + "' has one sample; skipping density");
      continue;
    }
    const std::string top = density_path(pc1, x_range, true, plot_y - margin_gap, density_size - 8.0);
    if (!top.empty()) {
      densities.child("path").attr("d", top).attr("stroke", color);
    }
    const std::string right =
        density_path(pc2, y_range, false, plot_x + plot_w + margin_gap, density_size - 8.0);
    if (!right.empty()) {
      densities.child("path").attr("d", right).attr("stroke", color);
    }
  }

  // Scatter points, group by group.
  auto& points = root.child("g");
  for (std::size_t g = 0; g < part.labels.size(); ++g) {
    const std::string& color = palette[g % palette.size()];
    for (Eigen::Index col : part.members[g]) {
      points.child("circle")
          .attr("cx", to_px_x(pca.scores(col, 0)))
          .attr("cy", to_px_y(pca.scores(col, 1)))
          .attr("r", 4.0)
          .attr("fill", color)
          .attr("fill-opacity", 0.85, 2);
    }
  }

  // Legend in the top-right density corner.
  auto& legend = root.child("g");
  double ly = 14.0;
  for (std::size_t g = 0; g < part.labels.size(); ++g) {
    legend.child("rect")
        .attr("x", plot_x + plot_w + margin_gap)
        .attr("y", ly - 9.0)
        .attr("width", 10.0)
        .attr("height", 10.0)
        .attr("fill", palette[g % palette.size()]);
    auto& t = legend.child("text");
    t.attr("x", plot_x + plot_w + margin_gap + 14.0)
        .attr("y", ly)
        .attr("font-size", 11.0, 1)
        .attr("text-anchor", "start");
    t.text(part.labels[g]);
    ly += 16.0;
  }

  return doc.render();
}

}  // namespace picrustkit::viz
