#include <doctest.h>

#include <cmath>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/rng.hpp"
#include "picrustkit/daa/daa.hpp"

#include "test_support.hpp"

using namespace picrustkit;

namespace {

AbundanceTable spiked_table(int n_features, int n_per_group, double spike_high, double spike_low,
                            std::uint64_t seed) {
  Rng rng(seed);
  AbundanceTable table;
  table.kind = FeatureKind::ko;
  for (int i = 0; i < n_features; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "K%05d", i + 1);
    table.feature_ids.push_back(id);
  }
  const int n = 2 * n_per_group;
  for (int s = 0; s < n; ++s) {
    char id[8];
    std::snprintf(id, sizeof id, "s%02d", s + 1);
    table.sample_ids.push_back(id);
  }
  table.values.resize(n_features, n);
  for (int i = 0; i < n_features; ++i) {
    for (int j = 0; j < n; ++j) {
      double base = 40.0 + 30.0 * rng.uniform();
      if (i == 0) base = j < n_per_group ? spike_high : spike_low;  // feature 1 is the spike
      table.values(i, j) = std::round(base);
    }
  }
  return table;
}

SampleMetadata two_groups(const AbundanceTable& table, int n_per_group) {
  SampleMetadata meta;
  meta.sample_ids = table.sample_ids;
  for (int j = 0; j < 2 * n_per_group; ++j) {
    meta.groups.push_back(j < n_per_group ? "case" : "ctrl");
  }
  return meta;
}

}  // namespace

TEST_CASE("aldex2 is bit-identical for a fixed seed") {
  const auto table = spiked_table(20, 4, 900, 30, 3);
  const auto meta = two_groups(table, 4);
  daa::DaaConfig config;
  config.seed = 123;
  config.mc_instances = 32;
  const auto a = daa::aldex2_daa(table, meta, config);
  const auto b = daa::aldex2_daa(table, meta, config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p_value == b[i].p_value);
    CHECK(a[i].effect == b[i].effect);
    CHECK(a[i].adjusted_p == b[i].adjusted_p);
  }
  config.seed = 124;
  const auto c = daa::aldex2_daa(table, meta, config);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_differs |= a[i].p_value != c[i].p_value;
  CHECK(any_differs);
}

TEST_CASE("a strongly spiked feature is significant") {
  // counts 1000 vs 10 on a 50-feature background, n = 5 per group
  const auto table = spiked_table(50, 5, 1000, 10, 4);
  const auto meta = two_groups(table, 5);
  daa::DaaConfig config;
  config.seed = 42;
  config.mc_instances = 128;
  const auto records = daa::aldex2_daa(table, meta, config);
  CHECK(records[0].feature_id == "K00001");
  CHECK(records[0].adjusted_p < 0.01);
  CHECK(records[0].log2_fold_change > 3.0);
  CHECK(records[0].effect > 1.0);
}

TEST_CASE("label swap negates the effect and keeps p exactly") {
  const auto table = spiked_table(15, 4, 500, 25, 5);
  auto meta = two_groups(table, 4);
  daa::DaaConfig config;
  config.seed = 9;
  config.mc_instances = 16;
  const auto forward = daa::aldex2_daa(table, meta, config);

  // Rename groups so the lexicographic order flips: case<ctrl vs aaa<zzz.
  SampleMetadata swapped = meta;
  for (auto& g : swapped.groups) g = g == "case" ? "zzz" : "aaa";
  const auto reversed = daa::aldex2_daa(table, swapped, config);
  REQUIRE(forward.size() == reversed.size());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    CHECK(forward[i].group1 == "case");
    CHECK(reversed[i].group1 == "aaa");  // old ctrl
    CHECK(reversed[i].p_value == forward[i].p_value);        // exact, draws are label-free
    CHECK(reversed[i].effect == doctest::Approx(-forward[i].effect).epsilon(1e-12));
    CHECK(reversed[i].log2_fold_change ==
          doctest::Approx(-forward[i].log2_fold_change).epsilon(1e-12));
  }
}

TEST_CASE("null data with identical columns stays insignificant") {
  AbundanceTable table;
  table.kind = FeatureKind::ko;
  const int n_features = 30;
  Rng rng(6);
  Eigen::VectorXd column(n_features);
  for (int i = 0; i < n_features; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "K%05d", i + 1);
    table.feature_ids.push_back(id);
    column[i] = std::round(20.0 + 200.0 * rng.uniform());
  }
  for (int j = 0; j < 10; ++j) {
    table.sample_ids.push_back("s" + std::to_string(j));
  }
  table.values = column.replicate(1, 10);
  const auto meta = two_groups(table, 5);

  daa::DaaConfig config;
  config.seed = 7;
  config.mc_instances = 128;
  const auto records = daa::aldex2_daa(table, meta, config);
  for (const auto& r : records) {
    CHECK(std::fabs(r.effect) < 0.2);  // declared tolerance at 128 instances
    CHECK(r.adjusted_p > 0.05);
    CHECK(r.p_value > 0.2);  // expected p of an exchangeable null sits near 0.5
    CHECK(std::fabs(r.log2_fold_change) < 1e-9);
  }
}

TEST_CASE("aldex2 preconditions and rounding warning") {
  const auto table = spiked_table(8, 3, 100, 50, 8);
  const auto meta = two_groups(table, 3);
  daa::DaaConfig config;
  config.mc_instances = 1;
  CHECK_THROWS_AS(daa::aldex2_daa(table, meta, config), validation_error);

  config.mc_instances = 8;
  SampleMetadata one_sample = meta;
  for (auto& g : one_sample.groups) g = "same";
  one_sample.groups[0] = "lonely";
  CHECK_THROWS_AS(daa::aldex2_daa(table, one_sample, config), validation_error);

  AbundanceTable fractional = table;
  fractional.values.array() += 0.3;
  diag::Capture capture;
  daa::aldex2_daa(fractional, meta, config);
  bool warned = false;
  for (const auto& w : capture.warnings) warned |= w.find("rounded") != std::string::npos;
  CHECK(warned);
}
