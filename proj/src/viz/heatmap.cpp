#include <algorithm>
#include <cmath>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/viz/plots.hpp"
#include "picrustkit/viz/svg.hpp"

namespace picrustkit::viz {

std::string pathway_heatmap(const AbundanceTable& table, const SampleMetadata& meta,
                            const std::vector<std::string>& features, const PlotOptions& options) {
  validate(options);
  if (features.empty()) throw validation_error("pathway_heatmap: no features given");
  if (table.sample_ids != meta.sample_ids) {
    throw validation_error("pathway_heatmap: table and metadata must be aligned");
  }

  std::vector<Eigen::Index> rows;
  for (const auto& id : features) {
    const auto idx = table.feature_index(id);
    if (!idx) throw validation_error("pathway_heatmap: unknown feature '" + id + "'");
    rows.push_back(*idx);
  }

  // Columns ordered group-by-group, samples lexicographic within group.
  const daa::GroupPartition part = daa::partition_by_group(meta);
  std::vector<Eigen::Index> columns;
  std::vector<std::pair<std::string, std::size_t>> group_spans;  // label, size
  for (std::size_t g = 0; g < part.labels.size(); ++g) {
    std::vector<Eigen::Index> cols = part.members[g];
    std::sort(cols.begin(), cols.end(), [&](Eigen::Index a, Eigen::Index b) {
      return table.sample_ids[std::size_t(a)] < table.sample_ids[std::size_t(b)];
    });
    group_spans.emplace_back(part.labels[g], cols.size());
    columns.insert(columns.end(), cols.begin(), cols.end());
  }

  // Row z-scores across all samples; constant rows render as mid-color.
  constexpr double clip = 3.0;
  Eigen::MatrixXd z(Eigen::Index(rows.size()), Eigen::Index(columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::RowVectorXd raw = table.values.row(rows[r]);
    const double mean = raw.mean();
    const double sd = std::sqrt((raw.array() - mean).square().sum() / double(raw.size() - 1));
    if (sd == 0.0) {
      diag::warn("pathway_heatmap: feature '" + features[r] + "' is constant; rendering mid-color");
      z.row(Eigen::Index(r)).setZero();
      continue;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      z(Eigen::Index(r), Eigen::Index(c)) = (raw[columns[c]] - mean) / sd;
    }
  }

  const double font = 11.0;
  double label_w = 90.0;
  for (const auto& id : features) {
    label_w = std::max(label_w, estimate_text_width(id, font) + 10.0);
  }
  label_w = std::min(label_w, options.width_px * 0.4);
  const double band_h = 16.0;
  const double top = 26.0 + band_h;
  const double grid_w = options.width_px - label_w - 20.0;
  const double cell_w = grid_w / double(columns.size());
  const double cell_h =
      std::max(10.0, std::min(26.0, (options.height_px - top - 40.0) / double(rows.size())));
  const int height = std::max(options.height_px, int(top + cell_h * double(rows.size()) + 40.0));

  SvgDocument doc(options.width_px, height);
  auto& root = doc.root();
  root.attr("font-family", options.font_family);

  const auto& palette = palette_colors(options.palette);

  // Group annotation band.
  auto& band = root.child("g");
  double band_x = label_w;
  for (std::size_t g = 0; g < group_spans.size(); ++g) {
    const double w = cell_w * double(group_spans[g].second);
    band.child("rect")
        .attr("x", band_x)
        .attr("y", top - band_h - 2.0)
        .attr("width", w)
        .attr("height", band_h)
        .attr("fill", palette[g % palette.size()]);
    auto& t = band.child("text");
    t.attr("x", band_x + w / 2.0)
        .attr("y", top - band_h / 2.0 + 2.0)
        .attr("font-size", font, 1)
        .attr("text-anchor", "middle")
        .attr("fill", "#FFFFFF");
    t.text(group_spans[g].first);
    band_x += w;
  }

  auto& grid = root.child("g");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& t = grid.child("text");
    t.attr("x", label_w - 6.0)
        .attr("y", top + cell_h * (double(r) + 0.5) + 4.0)
        .attr("font-size", font, 1)
        .attr("text-anchor", "end");
    t.text(features[r]);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      grid.child("rect")
          .attr("x", label_w + cell_w * double(c))
          .attr("y", top + cell_h * double(r))
          .attr("width", cell_w + 0.5)
          .attr("height", cell_h + 0.5)
          .attr("fill", diverging_color(z(Eigen::Index(r), Eigen::Index(c)), clip));
    }
  }

  // Sample labels under the grid.
  auto& labels = root.child("g");
  const double label_y = top + cell_h * double(rows.size()) + 14.0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    auto& t = labels.child("text");
    const double cx = label_w + cell_w * (double(c) + 0.5);
    t.attr("x", cx)
        .attr("y", label_y)
        .attr("font-size", std::min(font, cell_w * 0.9), 1)
        .attr("text-anchor", "end")
        .attr("transform",
              "rotate(-60 " + text::format_fixed(cx, 2) + "," + text::format_fixed(label_y, 2) + ")");
    t.text(table.sample_ids[std::size_t(columns[c])]);
  }

  return doc.render();
}

}  // namespace picrustkit::viz
