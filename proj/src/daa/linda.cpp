#include <cmath>

#include "picrustkit/compositions.hpp"
#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/stats/kde.hpp"
#include "picrustkit/stats/special_functions.hpp"

namespace picrustkit::daa {

std::vector<DaaResultRecord> linda_daa(const AbundanceTable& table, const SampleMetadata& meta,
                                       const DaaConfig& config) {
  const GroupPartition part = partition_by_group(meta);
  if (part.labels.size() != 2) throw validation_error("linda: exactly 2 groups required");
  for (std::size_t g = 0; g < part.labels.size(); ++g) {
    if (part.members[g].size() < 2) {
      throw validation_error("linda: group '" + part.labels[g] + "' has fewer than 2 samples");
    }
    if (part.members[g].size() < 3) {
      diag::warn("linda: group '" + part.labels[g] + "' has fewer than 3 samples");
    }
  }

  const auto [first, second] = order_two_groups(part, config.reference_group);

  const Eigen::Index n_samples = table.n_samples();
  const Eigen::Index n_features = table.n_features();
  const Eigen::Index n_regressors = 2 + Eigen::Index(meta.covariates.size());
  if (n_samples < n_regressors + 1) {
    throw validation_error("linda: fewer samples than regressors + 1");
  }

  // Design: intercept + group indicator (1 = group1, so positive
  // coefficients mean higher in group1) + covariates in name order.
  Eigen::MatrixXd design(n_samples, n_regressors);
  design.col(0).setOnes();
  for (Eigen::Index j = 0; j < n_samples; ++j) {
    design(j, 1) = meta.groups[std::size_t(j)] == part.labels[first] ? 1.0 : 0.0;
  }
  Eigen::Index col = 2;
  for (const auto& [name, values] : meta.covariates) {
    for (Eigen::Index j = 0; j < n_samples; ++j) design(j, col) = values[std::size_t(j)];
    ++col;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < n_regressors) throw validation_error("linda: design matrix is rank-deficient");

  // Log relative abundances after the pseudo-count.
  const Eigen::MatrixXd shifted = table.values.array() + config.pseudo_count;
  const Eigen::MatrixXd relative_shifted = relative_abundance(shifted, &table.sample_ids);
  const Eigen::MatrixXd w = relative_shifted.array().log().matrix().transpose();  // samples x features

  const Eigen::MatrixXd xtx_inv =
      (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(n_regressors, n_regressors));
  const double gg = xtx_inv(1, 1);
  const double df = double(n_samples - n_regressors);

  Eigen::VectorXd beta(n_features);
  Eigen::VectorXd se(n_features);
  for (Eigen::Index i = 0; i < n_features; ++i) {
    const Eigen::VectorXd coef = qr.solve(w.col(i));
    const double rss = (w.col(i) - design * coef).squaredNorm();
    beta[i] = coef[1];
    se[i] = std::sqrt(std::max(0.0, rss / df * gg));
  }

  // Compositional bias correction: subtract the mode of the raw coefficients.
  const double bias = stats::kde_mode(beta, 512);
  const Eigen::VectorXd debiased = beta.array() - bias;

  const Eigen::MatrixXd relative = relative_abundance(table.values, &table.sample_ids);

  const std::size_t n_features_z = std::size_t(n_features);
  std::vector<DaaResultRecord> records(n_features_z);
  std::vector<double> p_values(n_features_z);
  for (Eigen::Index i = 0; i < n_features; ++i) {
    auto& r = records[std::size_t(i)];
    r.feature_id = table.feature_ids[std::size_t(i)];
    r.method = "linda";
    r.group1 = part.labels[first];
    r.group2 = part.labels[second];
    r.effect = debiased[i] / std::log(2.0);
    r.log2_fold_change = r.effect;
    r.adjust_method = stats::adjust_method_name(config.p_adjust);
    r.note = "bias=" + text::format_full(bias / std::log(2.0)) + " df=" + text::format_full(df);
    if (se[i] == 0.0) {
      r.p_value = debiased[i] == 0.0 ? 1.0 : 0.0;
      r.note += " degenerate: zero residual variance";
    } else {
      const double t = debiased[i] / se[i];
      r.p_value = std::min(1.0, 2.0 * stats::student_t_sf(std::fabs(t), df));
    }
    p_values[std::size_t(i)] = r.p_value;
  }
  const auto adjusted = stats::adjust_p_values(p_values, config.p_adjust);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].adjusted_p = adjusted[i];
  return records;
}

}  // namespace picrustkit::daa
