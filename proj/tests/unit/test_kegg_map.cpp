#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/rng.hpp"
#include "picrustkit/kegg/ko_pathway_map.hpp"

#include "test_support.hpp"

using namespace picrustkit;

TEST_CASE("toy map parses with shared members") {
  std::istringstream in("ko00010\tK00001,K00002\nko00020\tK00002\n");
  const auto map = parse_ko_map(in);
  CHECK(map.pathway_count() == 2);
  CHECK(map.ko_count() == 2);
  CHECK(map.entries.at("ko00010").count("K00002") == 1);
  CHECK(map.entries.at("ko00020").count("K00002") == 1);
  CHECK(map.max_pathways_per_ko() == 2);
}

TEST_CASE("malformed map lines carry line numbers") {
  std::istringstream bad_id("bogus\tK00001\n");
  CHECK_THROWS_WITH_AS(parse_ko_map(bad_id), doctest::Contains("line 1"), validation_error);
  std::istringstream bad_ko("ko00010\tK1\n");
  CHECK_THROWS_AS(parse_ko_map(bad_ko), validation_error);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_ko_map(empty), validation_error);
  std::istringstream no_members("ko00010\t,\n");
  CHECK_THROWS_AS(parse_ko_map(no_members), validation_error);
}

TEST_CASE("bundled snapshot loads and validates") {
  setenv("PICRUSTKIT_DATA_DIR", test_support::data_dir().c_str(), 1);
  const auto map = load_ko_map();
  CHECK(map.pathway_count() > 0);
  for (const auto& [pathway, members] : map.entries) {
    CHECK(is_kegg_pathway_id(pathway));
    CHECK(!members.empty());
  }
  CHECK(!map.provenance.empty());
  CHECK(map.entries.count("ko05016") == 1);
  CHECK(map.entries.count("ko05012") == 1);
}

TEST_CASE("toy conversion sums member rows") {
  std::istringstream in("ko00010\tK00001,K00002\n");
  const auto map = parse_ko_map(in);
  Eigen::MatrixXd v(2, 2);
  v << 1, 2, 3, 4;
  const auto table = test_support::make_table({"K00001", "K00002"}, {"s1", "s2"}, v, FeatureKind::ko);
  const auto result = ko2kegg_abundance(table, map);
  CHECK(result.table.kind == FeatureKind::kegg_pathway);
  CHECK(result.table.feature_ids == std::vector<std::string>{"ko00010"});
  CHECK(result.table.values(0, 0) == 4.0);
  CHECK(result.table.values(0, 1) == 6.0);
  REQUIRE(result.report.size() == 1);
  CHECK(result.report[0].matched_members == 2);
  CHECK(result.report[0].total_members == 2);
}

TEST_CASE("a shared KO contributes fully to every containing pathway") {
  std::istringstream in("ko00010\tK00001,K00002\nko00020\tK00002\n");
  const auto map = parse_ko_map(in);
  Eigen::MatrixXd v(2, 1);
  v << 5, 7;
  const auto table = test_support::make_table({"K00001", "K00002"}, {"s1"}, v, FeatureKind::ko);
  const auto result = ko2kegg_abundance(table, map);
  CHECK(result.table.values(0, 0) == 12.0);  // ko00010
  CHECK(result.table.values(1, 0) == 7.0);   // ko00020, full K00002 mass
}

TEST_CASE("pathways without members or signal are dropped") {
  std::istringstream in("ko00010\tK00001\nko00020\tK09999\nko00030\tK00002\n");
  const auto map = parse_ko_map(in);
  Eigen::MatrixXd v(2, 1);
  v << 3, 0;
  const auto table = test_support::make_table({"K00001", "K00002"}, {"s1"}, v, FeatureKind::ko);
  const auto result = ko2kegg_abundance(table, map);
  CHECK(result.table.feature_ids == std::vector<std::string>{"ko00010"});
  CHECK(result.dropped == std::vector<std::string>{"ko00020", "ko00030"});
}

TEST_CASE("conversion with zero surviving pathways is a hard error") {
  std::istringstream in("ko00010\tK09999\n");
  const auto map = parse_ko_map(in);
  Eigen::MatrixXd v(1, 1);
  v << 1;
  const auto table = test_support::make_table({"K00001"}, {"s1"}, v, FeatureKind::ko);
  CHECK_THROWS_AS(ko2kegg_abundance(table, map), validation_error);
}

TEST_CASE("wrong input kind is rejected, unknown warns") {
  std::istringstream in("ko00010\tK00001\n");
  const auto map = parse_ko_map(in);
  Eigen::MatrixXd v(1, 1);
  v << 1;
  auto table = test_support::make_table({"K00001"}, {"s1"}, v, FeatureKind::ec);
  CHECK_THROWS_AS(ko2kegg_abundance(table, map), validation_error);
  table.kind = FeatureKind::unknown;
  diag::Capture capture;
  CHECK_NOTHROW(ko2kegg_abundance(table, map));
  CHECK(!capture.warnings.empty());
}

namespace {

// Naive double loop over pathways and KOs, independent of the implementation.
Eigen::MatrixXd oracle_convert(const AbundanceTable& table, const KoToPathwayMap& map,
                               std::vector<std::string>& pathway_ids) {
  std::vector<std::pair<std::string, Eigen::RowVectorXd>> rows;
  for (const auto& [pathway, members] : map.entries) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(table.n_samples());
    bool any = false;
    for (Eigen::Index i = 0; i < table.n_features(); ++i) {
      if (members.count(table.feature_ids[std::size_t(i)])) {
        row += table.values.row(i);
        any = true;
      }
    }
    if (any && row.maxCoeff() > 0.0) rows.emplace_back(pathway, row);
  }
  Eigen::MatrixXd out(Eigen::Index(rows.size()), table.n_samples());
  pathway_ids.clear();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    pathway_ids.push_back(rows[r].first);
    out.row(Eigen::Index(r)) = rows[r].second;
  }
  return out;
}

KoToPathwayMap random_map(Rng& rng, int n_pathways, int n_kos) {
  KoToPathwayMap map;
  for (int p = 0; p < n_pathways; ++p) {
    char pid[10];
    std::snprintf(pid, sizeof pid, "ko%05d", 10 + p * 10);
    std::set<std::string> members;
    const int count = 1 + int(rng.uniform_below(std::uint64_t(n_kos)));
    for (int k = 0; k < count; ++k) {
      char kid[8];
      std::snprintf(kid, sizeof kid, "K%05d", 1 + int(rng.uniform_below(std::uint64_t(n_kos + 3))));
      members.insert(kid);
    }
    map.entries.emplace(pid, std::move(members));
  }
  return map;
}

AbundanceTable random_ko_table(Rng& rng, int n_kos, int n_samples) {
  AbundanceTable table;
  table.kind = FeatureKind::ko;
  for (int k = 0; k < n_kos; ++k) {
    char kid[8];
    std::snprintf(kid, sizeof kid, "K%05d", 1 + k);
    table.feature_ids.push_back(kid);
  }
  for (int s = 0; s < n_samples; ++s) table.sample_ids.push_back("s" + std::to_string(s));
  table.values.resize(n_kos, n_samples);
  for (int i = 0; i < n_kos; ++i) {
    for (int j = 0; j < n_samples; ++j) {
      table.values(i, j) = rng.uniform_below(4) == 0 ? 0.0 : rng.uniform() * 100.0;
    }
  }
  return table;
}

}  // namespace

TEST_CASE("random conversions match the naive oracle exactly") {
  Rng rng(77);
  for (int rep = 0; rep < 25; ++rep) {
    const auto map = random_map(rng, 4 + int(rng.uniform_below(4)), 10);
    const auto table = random_ko_table(rng, 10, 3);
    std::vector<std::string> oracle_ids;
    const auto expected = oracle_convert(table, map, oracle_ids);
    if (oracle_ids.empty()) {
      CHECK_THROWS_AS(ko2kegg_abundance(table, map), validation_error);
      continue;
    }
    const auto result = ko2kegg_abundance(table, map);
    CHECK(result.table.feature_ids == oracle_ids);
    CHECK(result.table.values == expected);  // exact: fixed summation order
  }
}

TEST_CASE("conversion additivity, monotonicity, and mass bound") {
  Rng rng(78);
  for (int rep = 0; rep < 10; ++rep) {
    const auto map = random_map(rng, 5, 10);
    auto t1 = random_ko_table(rng, 10, 3);
    auto t2 = t1;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 3; ++j) t2.values(i, j) = rng.uniform() * 50.0;
    }
    AbundanceTable sum = t1;
    sum.values = t1.values + t2.values;
    Ko2KeggResult r1, r2, rs;
    try {
      r1 = ko2kegg_abundance(t1, map);
      r2 = ko2kegg_abundance(t2, map);
      rs = ko2kegg_abundance(sum, map);
    } catch (const validation_error&) {
      continue;  // no surviving pathway in one of the tables
    }
    // additivity restricted to pathways surviving in both
    for (std::size_t i = 0; i < rs.table.feature_ids.size(); ++i) {
      const auto& pathway = rs.table.feature_ids[i];
      const auto i1 = r1.table.feature_index(pathway);
      const auto i2 = r2.table.feature_index(pathway);
      if (!i1 || !i2) continue;
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(rs.table.values(Eigen::Index(i), j) ==
              r1.table.values(*i1, j) + r2.table.values(*i2, j));
      }
    }
    // monotonicity: bumping one KO never decreases any pathway value
    AbundanceTable bumped = t1;
    bumped.values(2, 1) += 13.0;
    const auto rb = ko2kegg_abundance(bumped, map);
    for (std::size_t i = 0; i < rb.table.feature_ids.size(); ++i) {
      const auto before = r1.table.feature_index(rb.table.feature_ids[i]);
      if (!before) continue;
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(rb.table.values(Eigen::Index(i), j) >= r1.table.values(*before, j) - 1e-12);
      }
    }
    // mass bound
    const double fan_out = double(map.max_pathways_per_ko());
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(r1.table.values.col(j).sum() <= fan_out * t1.values.col(j).sum() + 1e-9);
    }
  }
}
