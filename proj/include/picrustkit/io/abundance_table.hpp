#ifndef PICRUSTKIT_IO_ABUNDANCE_TABLE_HPP
#define PICRUSTKIT_IO_ABUNDANCE_TABLE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace picrustkit {

enum class FeatureKind { ko, ec, metacyc, kegg_pathway, unknown };

const char* feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

// Advisory id-pattern checks; violations warn rather than fail unless an
// operation requires a specific kind.
bool is_ko_id(const std::string& id);            // K#####
bool is_kegg_pathway_id(const std::string& id);  // ko#####
bool is_ec_id(const std::string& id);            // EC:n.n.n.n

// Majority vote over feature ids; unknown unless one pattern wins >= 90%.
FeatureKind infer_feature_kind(const std::vector<std::string>& feature_ids);

// Dense feature x sample matrix with non-negative finite values. Immutable by
// convention after construction; safe to share across threads read-only.
struct AbundanceTable {
  std::vector<std::string> feature_ids;  // rows
  std::vector<std::string> sample_ids;   // columns
  Eigen::MatrixXd values;
  FeatureKind kind = FeatureKind::unknown;

  Eigen::Index n_features() const { return Eigen::Index(feature_ids.size()); }
  Eigen::Index n_samples() const { return Eigen::Index(sample_ids.size()); }
  std::optional<Eigen::Index> feature_index(const std::string& id) const;
};

// Enforces the type invariants: unique ids, matching dimensions, finite
// non-negative values. Throws validation_error.
void validate(const AbundanceTable& table);

// Sample -> group assignment with optional numeric covariates, stored as
// vectors parallel to sample_ids.
struct SampleMetadata {
  std::vector<std::string> sample_ids;
  std::vector<std::string> groups;
  std::map<std::string, std::vector<double>> covariates;

  std::size_t n_samples() const { return sample_ids.size(); }
  std::optional<std::size_t> sample_index(const std::string& id) const;
  const std::string& group_of(std::size_t index) const { return groups[index]; }
  // Distinct group labels in ascending order.
  std::vector<std::string> group_labels() const;
};

void validate(const SampleMetadata& meta);

}  // namespace picrustkit

#endif  // PICRUSTKIT_IO_ABUNDANCE_TABLE_HPP
