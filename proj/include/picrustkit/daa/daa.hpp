#ifndef PICRUSTKIT_DAA_DAA_HPP
#define PICRUSTKIT_DAA_DAA_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "picrustkit/io/abundance_table.hpp"
#include "picrustkit/stats/p_adjust.hpp"

namespace picrustkit::daa {

enum class Method { student_t, welch_t, wilcoxon, kruskal_wallis, anova, aldex2, linda };

const char* method_name(Method method);
Method method_from_name(const std::string& name);
std::vector<std::string> method_names();

struct DaaConfig {
  Method method = Method::welch_t;
  stats::AdjustMethod p_adjust = stats::AdjustMethod::bh;
  std::uint64_t seed = 42;
  int mc_instances = 128;       // aldex2 only
  double pseudo_count = 0.5;    // added before log transforms
  std::optional<std::string> reference_group;
};

struct DaaResultRecord {
  std::string feature_id;
  std::string method;
  std::string group1;
  std::string group2;  // "all" for omnibus tests
  double effect = 0.0;
  double log2_fold_change = 0.0;  // NaN when undefined (omnibus)
  double p_value = 1.0;
  double adjusted_p = 1.0;
  std::string adjust_method;
  std::string note;
};

// Two-group Monte Carlo method: Dirichlet resamples of the count composition,
// CLR transform, per-instance Welch t (and rank-sum), summarized as expected
// p-values. Deterministic given the seed: the substream for a draw is keyed
// by (seed, sample index in canonical order, instance index), never by group
// or feature.
std::vector<DaaResultRecord> aldex2_daa(const AbundanceTable& table, const SampleMetadata& meta,
                                        const DaaConfig& config);

// Two-group linear-model method on log relative abundances with a global
// compositional bias correction: the mode of the raw group coefficients
// (Gaussian KDE, Silverman bandwidth, 512-point grid) is subtracted from
// every coefficient before the t-test.
std::vector<DaaResultRecord> linda_daa(const AbundanceTable& table, const SampleMetadata& meta,
                                       const DaaConfig& config);

// Dispatch over all methods. Omnibus methods run once; two-group methods run
// per pair (reference group vs others when configured, else all unordered
// pairs in lexicographic order). Adjustment is applied within each
// (method, pair) family across features. Output sorted by
// (group pair, adjusted_p, feature id).
std::vector<DaaResultRecord> pathway_daa(const AbundanceTable& table, const SampleMetadata& meta,
                                         const DaaConfig& config);

struct ConsensusRow {
  std::string feature_id;
  std::string group1;
  std::string group2;
  std::map<std::string, double> adjusted_p_by_method;
  double median_adjusted_p = 1.0;
  int n_significant = 0;
  bool consensus_flag = false;
};

// Cross-method agreement for one comparison family. All result lists must
// cover the same feature set and the same group pair.
std::vector<ConsensusRow> consensus_daa(const std::map<std::string, std::vector<DaaResultRecord>>& results,
                                        double alpha, int min_agree);

void write_daa_results(const std::vector<DaaResultRecord>& records, std::ostream& out);
void write_consensus(const std::vector<ConsensusRow>& rows, std::ostream& out);

// Mean-relative-abundance log2 fold change between two sample index sets,
// with a small epsilon guarding empty means.
double log2_fold_change(const Eigen::MatrixXd& relative, Eigen::Index feature,
                        const std::vector<Eigen::Index>& group1,
                        const std::vector<Eigen::Index>& group2);

struct GroupPartition {
  std::vector<std::string> labels;                  // ascending
  std::vector<std::vector<Eigen::Index>> members;   // column indices per label
};
GroupPartition partition_by_group(const SampleMetadata& meta);

// For a two-group partition: indices of (group1, group2). group1 is the
// reference group when one is configured, else the lexicographically smaller
// label.
std::pair<std::size_t, std::size_t> order_two_groups(const GroupPartition& part,
                                                     const std::optional<std::string>& reference);

// Restricts table + metadata to the given sample columns (order preserved).
std::pair<AbundanceTable, SampleMetadata> subset_samples(const AbundanceTable& table,
                                                         const SampleMetadata& meta,
                                                         const std::vector<Eigen::Index>& columns);

}  // namespace picrustkit::daa

#endif  // PICRUSTKIT_DAA_DAA_HPP
