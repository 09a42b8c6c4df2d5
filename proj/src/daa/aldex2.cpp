#include <algorithm>
#include <cmath>

#include "picrustkit/compositions.hpp"
#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/rng.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/stats/classic_tests.hpp"

namespace picrustkit::daa {

namespace {

double median(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct GroupStats {
  double mean = 0.0;
  double sd = 0.0;
};

GroupStats clr_group_stats(const Eigen::MatrixXd& clr, Eigen::Index feature,
                           const std::vector<Eigen::Index>& cols) {
  GroupStats s;
  for (Eigen::Index c : cols) s.mean += clr(feature, c);
  s.mean /= double(cols.size());
  double ss = 0.0;
  for (Eigen::Index c : cols) {
    const double d = clr(feature, c) - s.mean;
    ss += d * d;
  }
  if (cols.size() > 1) s.sd = std::sqrt(ss / double(cols.size() - 1));
  return s;
}

}  // namespace

std::vector<DaaResultRecord> aldex2_daa(const AbundanceTable& table, const SampleMetadata& meta,
                                        const DaaConfig& config) {
  if (config.mc_instances < 2) throw validation_error("aldex2: mc_instances must be >= 2");
  const GroupPartition part = partition_by_group(meta);
  if (part.labels.size() != 2) throw validation_error("aldex2: exactly 2 groups required");
  for (std::size_t g = 0; g < part.labels.size(); ++g) {
    if (part.members[g].size() < 2) {
      throw validation_error("aldex2: group '" + part.labels[g] + "' has fewer than 2 samples");
    }
  }
  const auto [first, second] = order_two_groups(part, config.reference_group);

  const Eigen::Index n_features = table.n_features();
  const Eigen::Index n_samples = table.n_samples();
  const std::size_t n_features_z = std::size_t(n_features);

  // The Dirichlet model wants counts; fractional inputs are rounded.
  Eigen::MatrixXd counts = table.values.array().round();
  const double rounding_error = (table.values - counts).array().abs().maxCoeff();
  if (rounding_error > 0.01) {
    diag::warn("aldex2: input rounded to integers for the count model (max rounding error " +
               text::format_fixed(rounding_error, 4) + ")");
  }

  const auto& g1 = part.members[first];
  const auto& g2 = part.members[second];

  Eigen::VectorXd sum_p_welch = Eigen::VectorXd::Zero(n_features);
  Eigen::VectorXd sum_p_wilcox = Eigen::VectorXd::Zero(n_features);
  std::vector<std::vector<double>> effects(n_features_z);

  Eigen::MatrixXd composition(n_features, n_samples);
  for (int instance = 0; instance < config.mc_instances; ++instance) {
    // One substream per (sample, instance): draws do not depend on feature
    // order, group labels, or how many threads run the feature loop.
    for (Eigen::Index j = 0; j < n_samples; ++j) {
      Rng rng = Rng::substream(config.seed, std::uint64_t(j), std::uint64_t(instance));
      composition.col(j) = rng.dirichlet(counts.col(j).array() + 0.5);
    }
    const Eigen::MatrixXd clr = clr_transform(composition, 0.0);

    for (Eigen::Index i = 0; i < n_features; ++i) {
      Eigen::VectorXd a(Eigen::Index(g1.size())), b(Eigen::Index(g2.size()));
      for (std::size_t k = 0; k < g1.size(); ++k) a[Eigen::Index(k)] = clr(i, g1[k]);
      for (std::size_t k = 0; k < g2.size(); ++k) b[Eigen::Index(k)] = clr(i, g2[k]);
      sum_p_welch[i] += stats::run_classic_test({a, b}, stats::TestMethod::welch_t).p_value;
      sum_p_wilcox[i] += stats::run_classic_test({a, b}, stats::TestMethod::wilcoxon).p_value;

      const GroupStats s1 = clr_group_stats(clr, i, g1);
      const GroupStats s2 = clr_group_stats(clr, i, g2);
      const double denom = std::max({s1.sd, s2.sd, 1e-12});
      effects[std::size_t(i)].push_back((s1.mean - s2.mean) / denom);
    }
  }

  const Eigen::MatrixXd relative = relative_abundance(table.values, &table.sample_ids);

  std::vector<DaaResultRecord> records(n_features_z);
  std::vector<double> expected_p(n_features_z);
  for (Eigen::Index i = 0; i < n_features; ++i) {
    auto& r = records[std::size_t(i)];
    r.feature_id = table.feature_ids[std::size_t(i)];
    r.method = "aldex2";
    r.group1 = part.labels[first];
    r.group2 = part.labels[second];
    r.p_value = sum_p_welch[i] / double(config.mc_instances);
    r.effect = median(effects[std::size_t(i)]);
    r.log2_fold_change = log2_fold_change(relative, i, g1, g2);
    r.adjust_method = stats::adjust_method_name(config.p_adjust);
    r.note = "mc_instances=" + std::to_string(config.mc_instances) + " ep_wilcoxon=" +
             text::format_full(sum_p_wilcox[i] / double(config.mc_instances));
    expected_p[std::size_t(i)] = r.p_value;
  }
  const auto adjusted = stats::adjust_p_values(expected_p, config.p_adjust);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].adjusted_p = adjusted[i];
  return records;
}

}  // namespace picrustkit::daa
