#include <algorithm>
#include <cmath>

#include "picrustkit/compositions.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/viz/plots.hpp"
#include "picrustkit/viz/svg.hpp"

namespace picrustkit::viz {

SortBy sort_by_from_name(const std::string& name) {
  if (name == "adjusted_p") return SortBy::adjusted_p;
  if (name == "class_then_p") return SortBy::class_then_p;
  if (name == "effect") return SortBy::effect;
  throw validation_error("unknown sort_by '" + name +
                         "' (expected adjusted_p, class_then_p, or effect)");
}

void validate(const PlotOptions& options) {
  if (options.width_px < 100 || options.height_px < 100) {
    throw validation_error("plot size must be at least 100x100 px");
  }
  if (options.max_features < 1) throw validation_error("max_features must be positive");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw validation_error("alpha must be in (0,1)");
  }
  palette_colors(options.palette);
}

namespace {

std::string format_p(double p) {
  if (std::isnan(p)) return "NA";
  if (p != 0.0 && p < 1e-3) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p, std::chars_format::scientific, 2);
    (void)ec;
    return std::string(buf, ptr);
  }
  return text::format_fixed(p, 3);
}

struct Row {
  const daa::DaaResultRecord* record;
  std::string label;
  std::string class_group;
  double mean1, se1, mean2, se2;
};

}  // namespace

std::string pathway_errorbar(const AbundanceTable& table, const SampleMetadata& meta,
                             const std::vector<daa::DaaResultRecord>& daa_results,
                             const std::map<std::string, annotate::AnnotationRecord>& annotations,
                             const PlotOptions& options) {
  validate(options);
  if (daa_results.empty()) throw validation_error("pathway_errorbar: empty DA results");
  for (const auto& r : daa_results) {
    if (r.method != daa_results.front().method || r.group1 != daa_results.front().group1 ||
        r.group2 != daa_results.front().group2) {
      throw validation_error("pathway_errorbar: DA results span more than one comparison family");
    }
  }
  if (table.sample_ids != meta.sample_ids) {
    throw validation_error("pathway_errorbar: table and metadata must be aligned");
  }

  const std::string& group1 = daa_results.front().group1;
  const std::string& group2 = daa_results.front().group2;
  const daa::GroupPartition part = daa::partition_by_group(meta);
  auto members_of = [&](const std::string& label) -> const std::vector<Eigen::Index>& {
    const auto it = std::find(part.labels.begin(), part.labels.end(), label);
    if (it == part.labels.end()) {
      throw validation_error("pathway_errorbar: group '" + label + "' not present in metadata");
    }
    return part.members[std::size_t(it - part.labels.begin())];
  };
  const auto& cols1 = members_of(group1);
  const auto& cols2 = members_of(group2);

  // Selection: significant features first; fall back to the smallest
  // adjusted p with a banner note when nothing passes.
  std::vector<const daa::DaaResultRecord*> sorted;
  for (const auto& r : daa_results) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const daa::DaaResultRecord* a, const daa::DaaResultRecord* b) {
                     if (a->adjusted_p != b->adjusted_p) return a->adjusted_p < b->adjusted_p;
                     return a->feature_id < b->feature_id;
                   });
  std::vector<const daa::DaaResultRecord*> selected;
  for (const auto* r : sorted) {
    if (r->adjusted_p <= options.alpha && int(selected.size()) < options.max_features) {
      selected.push_back(r);
    }
  }
  bool fallback = selected.empty();
  if (fallback) {
    for (const auto* r : sorted) {
      if (int(selected.size()) < options.max_features) selected.push_back(r);
    }
  }

  const Eigen::MatrixXd relative = relative_abundance(table.values, &table.sample_ids);
  auto group_mean_se = [&](Eigen::Index feature, const std::vector<Eigen::Index>& cols, double& mean,
                           double& se) {
    mean = 0.0;
    for (Eigen::Index c : cols) mean += relative(feature, c);
    mean /= double(cols.size());
    double ss = 0.0;
    for (Eigen::Index c : cols) {
      const double d = relative(feature, c) - mean;
      ss += d * d;
    }
    se = cols.size() > 1 ? std::sqrt(ss / double(cols.size() - 1) / double(cols.size())) : 0.0;
  };

  std::vector<Row> rows;
  for (const auto* r : selected) {
    const auto feature = table.feature_index(r->feature_id);
    if (!feature) {
      throw validation_error("pathway_errorbar: feature '" + r->feature_id +
                             "' missing from the abundance table");
    }
    Row row;
    row.record = r;
    const auto it = annotations.find(r->feature_id);
    row.label = it != annotations.end() && it->second.pathway_name ? *it->second.pathway_name
                                                                   : r->feature_id;
    row.class_group =
        it != annotations.end() ? it->second.class_group() : std::string("Unclassified");
    group_mean_se(*feature, cols1, row.mean1, row.se1);
    group_mean_se(*feature, cols2, row.mean2, row.se2);
    rows.push_back(std::move(row));
  }

  switch (options.sort_by) {
    case SortBy::adjusted_p:
      break;  // already sorted
    case SortBy::effect:
      std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::fabs(a.record->effect) > std::fabs(b.record->effect);
      });
      break;
    case SortBy::class_then_p:
      std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.class_group != b.class_group) return a.class_group < b.class_group;
        return a.record->adjusted_p < b.record->adjusted_p;
      });
      break;
  }

  // Layout.
  const auto& palette = palette_colors(options.palette);
  const double font = 11.0;
  const double row_h = 22.0;
  const double header_h = options.sort_by == SortBy::class_then_p ? 20.0 : 0.0;
  double label_w = 120.0;
  for (const auto& row : rows) {
    label_w = std::max(label_w, estimate_text_width(row.label, font) + 12.0);
  }
  label_w = std::min(label_w, options.width_px * 0.45);
  const double top = 54.0;
  const double bar_x = label_w + 8.0;
  const double bar_w = std::max(120.0, options.width_px * 0.30);
  const double lfc_x = bar_x + bar_w + 30.0;
  const double lfc_w = std::max(90.0, options.width_px * 0.18);
  const double p_x = lfc_x + lfc_w + 24.0;

  std::size_t n_headers = 0;
  if (options.sort_by == SortBy::class_then_p) {
    std::string last;
    for (const auto& row : rows) {
      if (row.class_group != last) {
        ++n_headers;
        last = row.class_group;
      }
    }
  }
  const int height =
      std::max(options.height_px, int(top + double(rows.size()) * row_h +
                                      double(n_headers) * header_h + 30.0));

  double max_abund = 1e-12;
  double max_lfc = 1e-9;
  for (const auto& row : rows) {
    max_abund = std::max({max_abund, row.mean1 + row.se1, row.mean2 + row.se2});
    if (!std::isnan(row.record->log2_fold_change)) {
      max_lfc = std::max(max_lfc, std::fabs(row.record->log2_fold_change));
    }
  }
  max_abund *= 1.05;
  max_lfc *= 1.1;

  SvgDocument doc(options.width_px, height);
  auto& root = doc.root();
  root.attr("font-family", options.font_family);

  auto add_text = [&](SvgElement& parent, double x, double y, const std::string& content,
                      const std::string& anchor, double size, const std::string& extra_fill = "") {
    auto& t = parent.child("text");
    t.attr("x", x).attr("y", y).attr("font-size", size, 1).attr("text-anchor", anchor);
    if (!extra_fill.empty()) t.attr("fill", extra_fill);
    t.text(content);
    return;
  };

  // Title and legend.
  add_text(root, 10.0, 18.0,
           std::string(daa_results.front().method) + ": " + group1 + " vs " + group2, "start",
           13.0);
  auto& legend = root.child("g");
  double legend_x = 10.0;
  const std::vector<std::pair<std::string, std::string>> legend_items = {{group1, palette[0]},
                                                                         {group2, palette[1]}};
  for (const auto& [label, color] : legend_items) {
    legend.child("rect")
        .attr("x", legend_x)
        .attr("y", 28.0)
        .attr("width", 12.0)
        .attr("height", 12.0)
        .attr("fill", color);
    add_text(legend, legend_x + 16.0, 38.0, label, "start", font);
    legend_x += 24.0 + estimate_text_width(label, font);
  }
  if (fallback) {
    add_text(root, options.width_px - 10.0, 18.0,
             "no feature passes adjusted p <= " + text::format_fixed(options.alpha, 3) +
                 "; showing the smallest adjusted p",
             "end", font, "#B2182B");
  }
  add_text(root, bar_x + bar_w / 2.0, top - 8.0, "mean relative abundance", "middle", font);
  add_text(root, lfc_x + lfc_w / 2.0, top - 8.0, "log2 fold change", "middle", font);
  add_text(root, p_x, top - 8.0, "adj. p", "start", font);

  auto& body = root.child("g");
  double y = top;
  std::string current_class;
  for (const auto& row : rows) {
    if (options.sort_by == SortBy::class_then_p && row.class_group != current_class) {
      current_class = row.class_group;
      auto& header = body.child("text");
      header.attr("x", 10.0)
          .attr("y", y + 14.0)
          .attr("font-size", font + 1.0, 1)
          .attr("font-weight", "bold");
      header.text(current_class);
      y += header_h;
    }

    add_text(body, label_w, y + row_h / 2.0 + 4.0, row.label, "end", font);

    // Two bars per row with optional SE whiskers.
    const double bar_h = 7.0;
    const struct {
      double mean, se, offset;
      const std::string& color;
    } bars[2] = {{row.mean1, row.se1, 3.0, palette[0]}, {row.mean2, row.se2, 12.0, palette[1]}};
    for (const auto& bar : bars) {
      const double w = bar.mean / max_abund * bar_w;
      body.child("rect")
          .attr("x", bar_x)
          .attr("y", y + bar.offset)
          .attr("width", w)
          .attr("height", bar_h)
          .attr("fill", bar.color);
      if (options.show_error_bars && bar.se > 0.0) {
        const double cy = y + bar.offset + bar_h / 2.0;
        const double lo = (bar.mean - bar.se) / max_abund * bar_w;
        const double hi = (bar.mean + bar.se) / max_abund * bar_w;
        auto& whisker = body.child("line");
        whisker.attr("class", "whisker")
            .attr("x1", bar_x + std::max(0.0, lo))
            .attr("y1", cy)
            .attr("x2", bar_x + hi)
            .attr("y2", cy)
            .attr("stroke", "#333333")
            .attr("stroke-width", 1.0, 1);
      }
    }

    // log2 fold change: zero axis, connector line, dot.
    const double zero_x = lfc_x + lfc_w / 2.0;
    body.child("line")
        .attr("x1", zero_x)
        .attr("y1", y + 2.0)
        .attr("x2", zero_x)
        .attr("y2", y + row_h - 2.0)
        .attr("stroke", "#CCCCCC")
        .attr("stroke-width", 1.0, 1);
    const double lfc = row.record->log2_fold_change;
    if (!std::isnan(lfc)) {
      const double dot_x = zero_x + lfc / max_lfc * (lfc_w / 2.0);
      const double cy = y + row_h / 2.0;
      body.child("line")
          .attr("x1", zero_x)
          .attr("y1", cy)
          .attr("x2", dot_x)
          .attr("y2", cy)
          .attr("stroke", "#555555")
          .attr("stroke-width", 1.2, 1);
      body.child("circle")
          .attr("cx", dot_x)
          .attr("cy", cy)
          .attr("r", 3.2)
          .attr("fill", lfc >= 0.0 ? palette[0] : palette[1]);
    }

    add_text(body, p_x, y + row_h / 2.0 + 4.0, format_p(row.record->adjusted_p), "start", font);
    y += row_h;
  }

  return doc.render();
}

}  // namespace picrustkit::viz
