#ifndef PICRUSTKIT_STATS_P_ADJUST_HPP
#define PICRUSTKIT_STATS_P_ADJUST_HPP

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "picrustkit/core/errors.hpp"

namespace picrustkit::stats {

enum class AdjustMethod { bh, holm, bonferroni, by, none };

inline const char* adjust_method_name(AdjustMethod m) {
  switch (m) {
    case AdjustMethod::bh: return "BH";
    case AdjustMethod::holm: return "holm";
    case AdjustMethod::bonferroni: return "bonferroni";
    case AdjustMethod::by: return "BY";
    default: return "none";
  }
}

inline AdjustMethod adjust_method_from_name(const std::string& name) {
  if (name == "BH" || name == "bh") return AdjustMethod::bh;
  if (name == "holm") return AdjustMethod::holm;
  if (name == "bonferroni") return AdjustMethod::bonferroni;
  if (name == "BY" || name == "by") return AdjustMethod::by;
  if (name == "none") return AdjustMethod::none;
  throw validation_error("unknown p-adjust method '" + name +
                         "' (expected BH, holm, bonferroni, BY, or none)");
}

// Adjusted p-values, returned in the input order.
inline std::vector<double> adjust_p_values(const std::vector<double>& p, AdjustMethod method) {
  const std::size_t m = p.size();
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw validation_error("adjust_p_values: p-value outside [0,1]");
  }
  if (method == AdjustMethod::none || m == 0) return p;

  std::vector<double> out(m);
  if (method == AdjustMethod::bonferroni) {
    for (std::size_t i = 0; i < m; ++i) out[i] = std::min(1.0, p[i] * double(m));
    return out;
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  if (method == AdjustMethod::holm) {
    // Step-down: running max of (m - i) * p_(i).
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      running = std::max(running, double(m - i) * p[order[i]]);
      out[order[i]] = std::min(1.0, running);
    }
    return out;
  }

  // BH / BY step-up: running min from the largest p downwards. BY scales by
  // the harmonic sum c(m).
  double harmonic = 1.0;
  if (method == AdjustMethod::by) {
    harmonic = 0.0;
    for (std::size_t i = 1; i <= m; ++i) harmonic += 1.0 / double(i);
  }
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double q = p[order[i]] * double(m) * harmonic / double(i + 1);
    running = std::min(running, q);
    out[order[i]] = std::min(1.0, running);
  }
  return out;
}

}  // namespace picrustkit::stats

#endif  // PICRUSTKIT_STATS_P_ADJUST_HPP
