#ifndef PICRUSTKIT_STATS_KDE_HPP
#define PICRUSTKIT_STATS_KDE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "picrustkit/core/errors.hpp"

namespace picrustkit::stats {

// Gaussian kernel density estimation with Silverman's rule-of-thumb
// bandwidth. One implementation, two callers: the linear-model bias
// correction (mode over a 512-point grid) and the PCA margin densities
// (256-point grid).

inline double silverman_bandwidth(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n < 2) return 0.0;
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / double(n - 1));

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * double(n - 1);
    const std::size_t lo = std::size_t(pos);
    const std::size_t hi = std::min<std::size_t>(lo + 1, n - 1);
    const double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  const double iqr = quantile(0.75) - quantile(0.25);

  // Fallback chain when the spread estimate collapses: sd, |x1|, 1.
  double spread = std::min(sd, iqr / 1.349);
  if (spread <= 0.0) spread = sd;
  if (spread <= 0.0) spread = std::fabs(sorted.front());
  if (spread <= 0.0) spread = 1.0;
  return 0.9 * spread * std::pow(double(n), -0.2);
}

struct KdeCurve {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
};

inline KdeCurve kde_on_grid(const Eigen::VectorXd& x, double lo, double hi, int grid_points,
                            double bandwidth) {
  if (grid_points < 2) throw validation_error("kde: grid needs >= 2 points");
  if (!(bandwidth > 0.0)) throw validation_error("kde: bandwidth must be positive");
  KdeCurve curve;
  curve.grid.resize(grid_points);
  curve.density.resize(grid_points);
  const double step = (hi - lo) / double(grid_points - 1);
  const double norm = 1.0 / (double(x.size()) * bandwidth * std::sqrt(2.0 * M_PI));
  for (int g = 0; g < grid_points; ++g) {
    const double point = lo + step * g;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double z = (point - x[i]) / bandwidth;
      acc += std::exp(-0.5 * z * z);
    }
    curve.grid[g] = point;
    curve.density[g] = acc * norm;
  }
  return curve;
}

// Mode of the sample estimated as the argmax of the KDE over an evenly spaced
// grid spanning [min, max]; ties break toward the smallest grid value. A
// sample with no spread (or a single value) returns that value directly.
inline double kde_mode(const Eigen::VectorXd& x, int grid_points = 512) {
  if (x.size() == 0) throw validation_error("kde_mode: empty sample");
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (lo == hi || x.size() == 1) return lo;
  const double h = silverman_bandwidth(x);
  if (!(h > 0.0)) return lo;
  const KdeCurve curve = kde_on_grid(x, lo, hi, grid_points, h);
  Eigen::Index best = 0;
  for (Eigen::Index g = 1; g < curve.density.size(); ++g) {
    if (curve.density[g] > curve.density[best]) best = g;
  }
  return curve.grid[best];
}

}  // namespace picrustkit::stats

#endif  // PICRUSTKIT_STATS_KDE_HPP
