#ifndef PICRUSTKIT_STATS_CLASSIC_TESTS_HPP
#define PICRUSTKIT_STATS_CLASSIC_TESTS_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace picrustkit::stats {

enum class TestMethod { student_t, welch_t, wilcoxon, kruskal_wallis, anova };

const char* test_method_name(TestMethod method);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> df;
  std::string method_detail;  // "exact", "normal-approximation", "degenerate", ...

  bool degenerate() const { return method_detail.find("degenerate") != std::string::npos; }
};

// Two-sided classic tests. student_t/welch_t/wilcoxon take exactly two
// groups; kruskal_wallis/anova take two or more. Zero-variance inputs yield
// flagged degenerate results instead of NaNs.
TestResult run_classic_test(const std::vector<Eigen::VectorXd>& groups, TestMethod method);

// Mann-Whitney normal approximation with tie correction; the continuity
// toggle exists so the H = z^2 identity with kruskal_wallis can be checked.
TestResult wilcoxon_normal_approx(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                  bool continuity_correction);

// Exact two-sided Mann-Whitney p by enumerating every assignment of ranks to
// the first group. Requires tie-free data; valid for small n1 + n2 only.
TestResult wilcoxon_exact(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Midranks of the pooled vector plus the tie term sum(t^3 - t) over tie runs.
std::vector<double> midranks(std::vector<double> pooled, double* tie_term = nullptr);

}  // namespace picrustkit::stats

#endif  // PICRUSTKIT_STATS_CLASSIC_TESTS_HPP
