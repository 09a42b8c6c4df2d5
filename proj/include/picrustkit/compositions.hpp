#ifndef PICRUSTKIT_COMPOSITIONS_HPP
#define PICRUSTKIT_COMPOSITIONS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "picrustkit/core/errors.hpp"

namespace picrustkit {

// Columns are samples, rows are features, throughout.

// Each column divided by its sum. An all-zero column is a hard error; the
// optional sample-name list makes that error actionable.
template <typename Derived>
Eigen::MatrixXd relative_abundance(const Eigen::MatrixBase<Derived>& values,
                                   const std::vector<std::string>* sample_names = nullptr) {
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const double total = values.col(j).sum();
    if (!(total > 0.0)) {
      std::string name = sample_names && j < Eigen::Index(sample_names->size())
                             ? (*sample_names)[j]
                             : ("column " + std::to_string(j));
      throw validation_error("relative_abundance: sample '" + name + "' sums to zero");
    }
    out.col(j) = values.col(j) / total;
  }
  return out;
}

// Centered log-ratio per column: ln(x_i + pseudo) minus the column mean of
// logs. Requires strictly positive entries after the pseudo-count.
template <typename Derived>
Eigen::MatrixXd clr_transform(const Eigen::MatrixBase<Derived>& values, double pseudo) {
  if (pseudo < 0.0) throw validation_error("clr_transform: pseudo-count must be >= 0");
  Eigen::MatrixXd logs(values.rows(), values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double v = values(i, j) + pseudo;
      if (!(v > 0.0)) {
        throw validation_error("clr_transform: non-positive entry at feature " + std::to_string(i) +
                               ", sample " + std::to_string(j) +
                               " (zero entry with pseudo-count 0?)");
      }
      logs(i, j) = std::log(v);
    }
  }
  logs.rowwise() -= logs.colwise().mean();
  return logs;
}

}  // namespace picrustkit

#endif  // PICRUSTKIT_COMPOSITIONS_HPP
