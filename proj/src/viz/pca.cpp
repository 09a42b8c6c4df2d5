#include "picrustkit/viz/pca.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"

namespace picrustkit::viz {

PcaResult compute_pca(const Eigen::MatrixXd& features_by_samples, int k, bool scale) {
  const Eigen::Index n_samples = features_by_samples.cols();
  if (n_samples < 2) throw validation_error("compute_pca: at least 2 samples required");

  Eigen::MatrixXd x = features_by_samples.transpose();  // samples x features
  x.rowwise() -= x.colwise().mean();

  std::vector<Eigen::Index> kept;
  if (scale) {
    Eigen::VectorXd sd(x.cols());
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      sd[f] = std::sqrt(x.col(f).squaredNorm() / double(n_samples - 1));
      if (sd[f] > 0.0) kept.push_back(f);
    }
    if (Eigen::Index(kept.size()) < x.cols()) {
      diag::warn("compute_pca: dropping " + std::to_string(x.cols() - Eigen::Index(kept.size())) +
                 " constant feature(s) before scaling");
    }
    Eigen::MatrixXd reduced(x.rows(), Eigen::Index(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) reduced.col(Eigen::Index(i)) = x.col(kept[i]) / sd[kept[i]];
    x = std::move(reduced);
  }

  const Eigen::Index n_features = x.cols();
  if (n_features == 0) throw validation_error("compute_pca: no non-constant features");
  if (k < 1 || Eigen::Index(k) > std::min(n_features, n_samples - 1)) {
    throw validation_error("compute_pca: k must be in [1, min(features, samples-1)]");
  }
  if (x.squaredNorm() == 0.0) throw validation_error("compute_pca: zero variance");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double total = sv.array().square().sum();

  PcaResult result;
  result.scores.resize(n_samples, k);
  result.loadings.resize(n_features, k);
  result.explained_variance_ratio.resize(k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd loading = svd.matrixV().col(c);
    Eigen::VectorXd score = svd.matrixU().col(c) * sv[c];
    // Largest-magnitude loading entry positive; first index wins ties.
    Eigen::Index pivot = 0;
    for (Eigen::Index f = 1; f < n_features; ++f) {
      if (std::fabs(loading[f]) > std::fabs(loading[pivot])) pivot = f;
    }
    if (loading[pivot] < 0.0) {
      loading = -loading;
      score = -score;
    }
    result.loadings.col(c) = loading;
    result.scores.col(c) = score;
    result.explained_variance_ratio[c] = sv[c] * sv[c] / total;
  }
  return result;
}

}  // namespace picrustkit::viz
