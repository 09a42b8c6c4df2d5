#include <algorithm>
#include <cmath>
#include <limits>

#include "picrustkit/compositions.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/stats/classic_tests.hpp"

namespace picrustkit::daa {

namespace {

stats::TestMethod to_test_method(Method method) {
  switch (method) {
    case Method::student_t: return stats::TestMethod::student_t;
    case Method::welch_t: return stats::TestMethod::welch_t;
    case Method::wilcoxon: return stats::TestMethod::wilcoxon;
    case Method::kruskal_wallis: return stats::TestMethod::kruskal_wallis;
    case Method::anova: return stats::TestMethod::anova;
    default: throw std::logic_error("not a classic test");
  }
}

Eigen::VectorXd feature_group_vector(const Eigen::MatrixXd& matrix, Eigen::Index feature,
                                     const std::vector<Eigen::Index>& cols) {
  Eigen::VectorXd v(Eigen::Index(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) v[Eigen::Index(k)] = matrix(feature, cols[k]);
  return v;
}

struct Pair {
  std::size_t a;  // index into partition labels
  std::size_t b;
};

std::vector<Pair> comparison_pairs(const GroupPartition& part,
                                   const std::optional<std::string>& reference) {
  std::vector<Pair> pairs;
  if (reference) {
    const auto it = std::find(part.labels.begin(), part.labels.end(), *reference);
    if (it == part.labels.end()) {
      throw validation_error("reference group '" + *reference + "' not present in metadata");
    }
    const std::size_t ref = std::size_t(it - part.labels.begin());
    for (std::size_t g = 0; g < part.labels.size(); ++g) {
      if (g != ref) pairs.push_back({ref, g});
    }
  } else {
    for (std::size_t a = 0; a < part.labels.size(); ++a) {
      for (std::size_t b = a + 1; b < part.labels.size(); ++b) pairs.push_back({a, b});
    }
  }
  return pairs;
}

}  // namespace

std::vector<DaaResultRecord> pathway_daa(const AbundanceTable& table, const SampleMetadata& meta,
                                         const DaaConfig& config) {
  if (table.sample_ids != meta.sample_ids) {
    throw validation_error("pathway_daa: table and metadata must be aligned (see align_samples)");
  }
  const GroupPartition part = partition_by_group(meta);
  if (part.labels.size() < 2) throw validation_error("pathway_daa: at least 2 groups required");

  const bool variance_based = config.method == Method::student_t ||
                              config.method == Method::welch_t || config.method == Method::anova;
  if (variance_based) {
    for (std::size_t g = 0; g < part.labels.size(); ++g) {
      if (part.members[g].size() < 2) {
        throw validation_error(std::string(method_name(config.method)) + ": group '" +
                               part.labels[g] + "' has a single sample");
      }
    }
  }

  std::vector<DaaResultRecord> records;
  const bool omnibus =
      config.method == Method::kruskal_wallis || config.method == Method::anova;

  if (omnibus) {
    // Classic omnibus tests run on the CLR scale (per-sample transform).
    const Eigen::MatrixXd clr = clr_transform(table.values, config.pseudo_count);
    std::vector<double> p(static_cast<std::size_t>(table.n_features()));
    for (Eigen::Index i = 0; i < table.n_features(); ++i) {
      std::vector<Eigen::VectorXd> groups;
      for (const auto& members : part.members) {
        groups.push_back(feature_group_vector(clr, i, members));
      }
      const auto result = stats::run_classic_test(groups, to_test_method(config.method));
      DaaResultRecord r;
      r.feature_id = table.feature_ids[std::size_t(i)];
      r.method = method_name(config.method);
      r.group1 = "all";
      r.group2 = "all";
      r.effect = result.statistic;
      r.log2_fold_change = std::numeric_limits<double>::quiet_NaN();
      r.p_value = result.p_value;
      r.adjust_method = stats::adjust_method_name(config.p_adjust);
      r.note = result.method_detail;
      p[std::size_t(i)] = r.p_value;
      records.push_back(std::move(r));
    }
    const auto adjusted = stats::adjust_p_values(p, config.p_adjust);
    for (std::size_t i = 0; i < records.size(); ++i) records[i].adjusted_p = adjusted[i];
  } else {
    const auto pairs = comparison_pairs(part, config.reference_group);
    const bool classic = config.method != Method::aldex2 && config.method != Method::linda;
    Eigen::MatrixXd clr, relative;
    if (classic) {
      clr = clr_transform(table.values, config.pseudo_count);
      relative = relative_abundance(table.values, &table.sample_ids);
    }
    for (const auto& pair : pairs) {
      if (classic) {
        std::vector<double> p(static_cast<std::size_t>(table.n_features()));
        std::vector<DaaResultRecord> family;
        for (Eigen::Index i = 0; i < table.n_features(); ++i) {
          const auto result = stats::run_classic_test(
              {feature_group_vector(clr, i, part.members[pair.a]),
               feature_group_vector(clr, i, part.members[pair.b])},
              to_test_method(config.method));
          DaaResultRecord r;
          r.feature_id = table.feature_ids[std::size_t(i)];
          r.method = method_name(config.method);
          r.group1 = part.labels[pair.a];
          r.group2 = part.labels[pair.b];
          r.log2_fold_change =
              log2_fold_change(relative, i, part.members[pair.a], part.members[pair.b]);
          r.effect = r.log2_fold_change;
          r.p_value = result.p_value;
          r.adjust_method = stats::adjust_method_name(config.p_adjust);
          r.note = result.method_detail;
          p[std::size_t(i)] = r.p_value;
          family.push_back(std::move(r));
        }
        const auto adjusted = stats::adjust_p_values(p, config.p_adjust);
        for (std::size_t i = 0; i < family.size(); ++i) family[i].adjusted_p = adjusted[i];
        records.insert(records.end(), family.begin(), family.end());
      } else {
        // Subset to the pair, preserving the canonical column order so the
        // Monte Carlo substream keys stay stable.
        std::vector<Eigen::Index> columns;
        for (Eigen::Index j = 0; j < table.n_samples(); ++j) {
          const auto& g = meta.groups[std::size_t(j)];
          if (g == part.labels[pair.a] || g == part.labels[pair.b]) columns.push_back(j);
        }
        auto [sub_table, sub_meta] = subset_samples(table, meta, columns);
        auto family = config.method == Method::aldex2 ? aldex2_daa(sub_table, sub_meta, config)
                                                      : linda_daa(sub_table, sub_meta, config);
        records.insert(records.end(), family.begin(), family.end());
      }
    }
  }

  std::sort(records.begin(), records.end(), [](const DaaResultRecord& a, const DaaResultRecord& b) {
    if (a.group1 != b.group1) return a.group1 < b.group1;
    if (a.group2 != b.group2) return a.group2 < b.group2;
    if (a.adjusted_p != b.adjusted_p) return a.adjusted_p < b.adjusted_p;
    return a.feature_id < b.feature_id;
  });
  return records;
}

}  // namespace picrustkit::daa
