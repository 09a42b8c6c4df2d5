#ifndef PICRUSTKIT_VIZ_PCA_HPP
#define PICRUSTKIT_VIZ_PCA_HPP

#include <Eigen/Dense>

namespace picrustkit::viz {

struct PcaResult {
  Eigen::MatrixXd scores;                     // samples x k
  Eigen::MatrixXd loadings;                   // features x k
  Eigen::VectorXd explained_variance_ratio;   // k entries, non-increasing
};

// Singular-value decomposition of the sample x feature matrix after
// centering (and unit-variance scaling when requested; constant features are
// dropped with a warning). Sign convention: the largest-magnitude entry of
// each loading vector is positive, which makes results unique.
//
// Input is feature x sample, matching the abundance-table orientation.
PcaResult compute_pca(const Eigen::MatrixXd& features_by_samples, int k, bool scale);

}  // namespace picrustkit::viz

#endif  // PICRUSTKIT_VIZ_PCA_HPP
