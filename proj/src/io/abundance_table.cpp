#include "picrustkit/io/abundance_table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "picrustkit/core/errors.hpp"

namespace picrustkit {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  if (to > s.size() || from >= to) return false;
  for (std::size_t i = from; i < to; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

template <typename T>
void require_unique(const std::vector<T>& ids, const char* what) {
  std::set<T> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw validation_error(std::string("duplicate ") + what + " '" + id + "'");
    }
  }
}

}  // namespace

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::ko: return "KO";
    case FeatureKind::ec: return "EC";
    case FeatureKind::metacyc: return "MetaCyc";
    case FeatureKind::kegg_pathway: return "KEGG_PATHWAY";
    default: return "UNKNOWN";
  }
}

FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "KO" || name == "ko") return FeatureKind::ko;
  if (name == "EC" || name == "ec") return FeatureKind::ec;
  if (name == "MetaCyc" || name == "metacyc") return FeatureKind::metacyc;
  if (name == "KEGG_PATHWAY" || name == "kegg_pathway" || name == "pathway")
    return FeatureKind::kegg_pathway;
  if (name == "UNKNOWN" || name == "unknown") return FeatureKind::unknown;
  throw validation_error("unknown feature kind '" + name +
                         "' (expected KO, EC, MetaCyc, KEGG_PATHWAY, or UNKNOWN)");
}

bool is_ko_id(const std::string& id) {
  return id.size() == 6 && id[0] == 'K' && all_digits(id, 1, 6);
}

bool is_kegg_pathway_id(const std::string& id) {
  return id.size() == 7 && id[0] == 'k' && id[1] == 'o' && all_digits(id, 2, 7);
}

bool is_ec_id(const std::string& id) {
  if (id.rfind("EC:", 0) != 0) return false;
  std::size_t pos = 3;
  for (int part = 0; part < 4; ++part) {
    std::size_t end = pos;
    while (end < id.size() && std::isdigit(static_cast<unsigned char>(id[end]))) ++end;
    if (end == pos) return false;
    pos = end;
    if (part < 3) {
      if (pos >= id.size() || id[pos] != '.') return false;
      ++pos;
    }
  }
  return pos == id.size();
}

FeatureKind infer_feature_kind(const std::vector<std::string>& feature_ids) {
  if (feature_ids.empty()) return FeatureKind::unknown;
  std::size_t ko = 0, pathway = 0, ec = 0;
  for (const auto& id : feature_ids) {
    if (is_ko_id(id)) ++ko;
    else if (is_kegg_pathway_id(id)) ++pathway;
    else if (is_ec_id(id)) ++ec;
  }
  const double threshold = 0.9 * double(feature_ids.size());
  if (double(ko) >= threshold) return FeatureKind::ko;
  if (double(pathway) >= threshold) return FeatureKind::kegg_pathway;
  if (double(ec) >= threshold) return FeatureKind::ec;
  return FeatureKind::unknown;
}

std::optional<Eigen::Index> AbundanceTable::feature_index(const std::string& id) const {
  auto it = std::find(feature_ids.begin(), feature_ids.end(), id);
  if (it == feature_ids.end()) return std::nullopt;
  return Eigen::Index(it - feature_ids.begin());
}

void validate(const AbundanceTable& table) {
  require_unique(table.feature_ids, "feature id");
  require_unique(table.sample_ids, "sample id");
  if (table.values.rows() != table.n_features() || table.values.cols() != table.n_samples()) {
    throw validation_error("abundance table dimensions do not match id lists");
  }
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      const double v = table.values(i, j);
      if (!std::isfinite(v)) {
        throw validation_error("non-finite abundance for feature '" + table.feature_ids[i] +
                               "', sample '" + table.sample_ids[j] + "'");
      }
      if (v < 0.0) {
        throw validation_error("negative abundance for feature '" + table.feature_ids[i] +
                               "', sample '" + table.sample_ids[j] + "'");
      }
    }
  }
}

std::optional<std::size_t> SampleMetadata::sample_index(const std::string& id) const {
  auto it = std::find(sample_ids.begin(), sample_ids.end(), id);
  if (it == sample_ids.end()) return std::nullopt;
  return std::size_t(it - sample_ids.begin());
}

std::vector<std::string> SampleMetadata::group_labels() const {
  std::set<std::string> unique(groups.begin(), groups.end());
  return {unique.begin(), unique.end()};
}

void validate(const SampleMetadata& meta) {
  require_unique(meta.sample_ids, "sample id");
  if (meta.groups.size() != meta.sample_ids.size()) {
    throw validation_error("metadata group list does not match sample list");
  }
  for (std::size_t i = 0; i < meta.groups.size(); ++i) {
    if (meta.groups[i].empty()) {
      throw validation_error("sample '" + meta.sample_ids[i] + "' has an empty group label");
    }
  }
  for (const auto& [name, values] : meta.covariates) {
    if (values.size() != meta.sample_ids.size()) {
      throw validation_error("covariate '" + name + "' does not match sample list");
    }
  }
}

}  // namespace picrustkit
