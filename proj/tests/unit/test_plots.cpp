#include <doctest.h>

#include <cmath>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/rng.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/viz/plots.hpp"
#include "picrustkit/viz/svg.hpp"

#include "test_support.hpp"

using namespace picrustkit;

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

struct PlotData {
  AbundanceTable table;
  SampleMetadata meta;
  std::vector<daa::DaaResultRecord> results;
  std::map<std::string, annotate::AnnotationRecord> annotations;
};

PlotData demo_like_data() {
  PlotData data;
  Rng rng(61);
  const std::vector<std::string> pathways = {"ko05016", "ko05012", "ko00010", "ko00020", "ko00190"};
  data.table.kind = FeatureKind::kegg_pathway;
  data.table.feature_ids = pathways;
  const int n = 12;
  for (int j = 0; j < n; ++j) {
    char id[8];
    std::snprintf(id, sizeof id, "s%02d", j + 1);
    data.table.sample_ids.push_back(id);
    data.meta.sample_ids.push_back(id);
    data.meta.groups.push_back(j < n / 2 ? "Case" : "Control");
  }
  data.table.values.resize(5, n);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < n; ++j) {
      double level = 100.0 * std::exp(0.2 * rng.normal());
      if (i < 2 && j < n / 2) level *= 6.0;  // the two disease pathways spike in Case
      data.table.values(i, j) = level;
    }
  }
  daa::DaaConfig config;
  config.method = daa::Method::welch_t;
  data.results = daa::pathway_daa(data.table, data.meta, config);

  annotate::AnnotationRecord hd;
  hd.feature_id = "ko05016";
  hd.pathway_name = "Huntington disease";
  hd.pathway_class = "Human Diseases; Neurodegenerative disease";
  annotate::AnnotationRecord pd = hd;
  pd.feature_id = "ko05012";
  pd.pathway_name = "Parkinson disease";
  annotate::AnnotationRecord gly;
  gly.feature_id = "ko00010";
  gly.pathway_name = "Glycolysis / Gluconeogenesis";
  gly.pathway_class = "Metabolism; Carbohydrate metabolism";
  data.annotations = {{"ko05016", hd}, {"ko05012", pd}, {"ko00010", gly}};
  return data;
}

}  // namespace

TEST_CASE("errorbar panel: well-formed, deterministic, annotated") {
  const auto data = demo_like_data();
  viz::PlotOptions options;
  options.sort_by = viz::SortBy::class_then_p;
  const auto svg = viz::pathway_errorbar(data.table, data.meta, data.results, data.annotations,
                                         options);
  CHECK(test_support::xml_problem(svg).empty());
  CHECK(svg.find("Huntington disease") != std::string::npos);
  CHECK(svg.find("Parkinson disease") != std::string::npos);
  CHECK(svg.find("Neurodegenerative disease") != std::string::npos);  // class header
  CHECK(svg.find("ko00020") != std::string::npos);                    // unannotated fallback label
  CHECK(count_occurrences(svg, "class=\"whisker\"") > 0);

  const auto again = viz::pathway_errorbar(data.table, data.meta, data.results, data.annotations,
                                           options);
  CHECK(svg == again);  // byte-identical
}

TEST_CASE("show_error_bars=false removes every whisker") {
  const auto data = demo_like_data();
  viz::PlotOptions options;
  options.show_error_bars = false;
  const auto svg = viz::pathway_errorbar(data.table, data.meta, data.results, data.annotations,
                                         options);
  CHECK(count_occurrences(svg, "class=\"whisker\"") == 0);
  CHECK(test_support::xml_problem(svg).empty());
}

TEST_CASE("errorbar falls back to top features with a banner when nothing is significant") {
  auto data = demo_like_data();
  for (auto& r : data.results) r.adjusted_p = std::max(r.adjusted_p, 0.9);
  viz::PlotOptions options;
  const auto svg = viz::pathway_errorbar(data.table, data.meta, data.results, data.annotations,
                                         options);
  CHECK(svg.find("no feature passes") != std::string::npos);
}

TEST_CASE("errorbar rejects empty or mixed-family results") {
  const auto data = demo_like_data();
  viz::PlotOptions options;
  CHECK_THROWS_AS(viz::pathway_errorbar(data.table, data.meta, {}, data.annotations, options),
                  validation_error);
  auto mixed = data.results;
  mixed.back().group2 = "Other";
  CHECK_THROWS_AS(viz::pathway_errorbar(data.table, data.meta, mixed, data.annotations, options),
                  validation_error);
}

TEST_CASE("pca plot: axis labels, densities, determinism") {
  const auto data = demo_like_data();
  viz::PlotOptions options;
  const auto svg = viz::pathway_pca(data.table, data.meta, options);
  CHECK(test_support::xml_problem(svg).empty());
  CHECK(svg.find("PC1 (") != std::string::npos);
  CHECK(svg.find("PC2 (") != std::string::npos);
  // percentages parse and sum to at most 100
  const auto pc1_pos = svg.find("PC1 (");
  const auto pc2_pos = svg.find("PC2 (");
  const double pct1 = std::stod(svg.substr(pc1_pos + 5));
  const double pct2 = std::stod(svg.substr(pc2_pos + 5));
  CHECK(pct1 + pct2 <= 100.0 + 1e-9);
  CHECK(pct1 >= pct2);
  // one density path per group and axis
  CHECK(count_occurrences(svg, "<path") == 4);
  CHECK(svg == viz::pathway_pca(data.table, data.meta, options));

  AbundanceTable two = data.table;
  two.sample_ids.resize(2);
  two.values.conservativeResize(Eigen::NoChange, 2);
  SampleMetadata two_meta;
  two_meta.sample_ids = two.sample_ids;
  two_meta.groups = {"Case", "Case"};
  CHECK_THROWS_AS(viz::pathway_pca(two, two_meta, options), validation_error);
}

TEST_CASE("heatmap: grouping, z-score colors, determinism") {
  const auto data = demo_like_data();
  viz::PlotOptions options;
  const std::vector<std::string> features = {"ko05016", "ko00010"};
  const auto svg = viz::pathway_heatmap(data.table, data.meta, features, options);
  CHECK(test_support::xml_problem(svg).empty());
  CHECK(svg.find("Case") != std::string::npos);
  CHECK(svg.find("Control") != std::string::npos);
  CHECK(count_occurrences(svg, "<rect") >= 2 * 12);  // cells + group band
  CHECK(svg == viz::pathway_heatmap(data.table, data.meta, features, options));

  CHECK_THROWS_WITH_AS(viz::pathway_heatmap(data.table, data.meta, {"ko99999"}, options),
                       doctest::Contains("ko99999"), validation_error);
  CHECK_THROWS_AS(viz::pathway_heatmap(data.table, data.meta, {}, options), validation_error);
}

TEST_CASE("heatmap renders constant rows as mid-color") {
  auto data = demo_like_data();
  data.table.values.row(4).setConstant(11.0);
  viz::PlotOptions options;
  diag::Capture capture;
  const auto svg = viz::pathway_heatmap(data.table, data.meta, {"ko00190"}, options);
  CHECK(!capture.warnings.empty());
  CHECK(count_occurrences(svg, "fill=\"#F7F7F7\"") == data.table.sample_ids.size());
}

TEST_CASE("heatmap cell colors follow the z-score sign") {
  // one feature high in Case, so Case cells trend red (#B2...) and Control blue (#21..)
  const auto data = demo_like_data();
  viz::PlotOptions options;
  const auto svg = viz::pathway_heatmap(data.table, data.meta, {"ko05016"}, options);
  // column order: Case samples first (lexicographic groups)
  const auto first_cell = svg.find("fill=\"#", svg.find("Control"));
  CHECK(first_cell != std::string::npos);
}

TEST_CASE("plot options validation") {
  const auto data = demo_like_data();
  viz::PlotOptions options;
  options.width_px = 50;
  CHECK_THROWS_AS(viz::pathway_pca(data.table, data.meta, options), validation_error);
  options.width_px = 800;
  options.palette = "nope";
  CHECK_THROWS_AS(viz::pathway_pca(data.table, data.meta, options), validation_error);
  options.palette = "okabe_ito";
  options.alpha = 1.5;
  CHECK_THROWS_AS(viz::pathway_pca(data.table, data.meta, options), validation_error);
}

TEST_CASE("svg writer escapes text and keeps attribute order") {
  viz::SvgDocument doc(200, 100);
  auto& t = doc.root().child("text");
  t.attr("x", 1.0).attr("y", 2.0);
  t.text("a < b & c > \"d\"");
  const auto svg = doc.render();
  CHECK(svg.find("a &lt; b &amp; c &gt; &quot;d&quot;") != std::string::npos);
  CHECK(test_support::xml_problem(svg).empty());
  CHECK(svg.find("<svg xmlns=") != std::string::npos);  // insertion order stable
  CHECK(svg.find("width=\"200\" height=\"100\"") != std::string::npos);
}

TEST_CASE("diverging color scale is symmetric and clipped") {
  CHECK(viz::diverging_color(0.0, 3.0) == "#F7F7F7");
  CHECK(viz::diverging_color(3.0, 3.0) == "#B2182B");
  CHECK(viz::diverging_color(-3.0, 3.0) == "#2166AC");
  CHECK(viz::diverging_color(99.0, 3.0) == viz::diverging_color(3.0, 3.0));
  CHECK(viz::diverging_color(-99.0, 3.0) == viz::diverging_color(-3.0, 3.0));
  CHECK(viz::palette_colors("okabe_ito").size() >= 8);
}
