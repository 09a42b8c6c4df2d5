#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"
#include "picrustkit/daa/daa.hpp"

namespace picrustkit::daa {

const char* method_name(Method method) {
  switch (method) {
    case Method::student_t: return "student_t";
    case Method::welch_t: return "welch_t";
    case Method::wilcoxon: return "wilcoxon";
    case Method::kruskal_wallis: return "kruskal_wallis";
    case Method::anova: return "anova";
    case Method::aldex2: return "aldex2";
    default: return "linda";
  }
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::student_t, Method::welch_t, Method::wilcoxon, Method::kruskal_wallis,
                   Method::anova, Method::aldex2, Method::linda}) {
    if (name == method_name(m)) return m;
  }
  throw validation_error("unknown DA method '" + name + "'; valid methods: " +
                         text::join(method_names(), ", "));
}

std::vector<std::string> method_names() {
  return {"student_t", "welch_t", "wilcoxon", "kruskal_wallis", "anova", "aldex2", "linda"};
}

GroupPartition partition_by_group(const SampleMetadata& meta) {
  GroupPartition part;
  part.labels = meta.group_labels();
  part.members.resize(part.labels.size());
  for (std::size_t j = 0; j < meta.sample_ids.size(); ++j) {
    const auto it = std::lower_bound(part.labels.begin(), part.labels.end(), meta.groups[j]);
    part.members[std::size_t(it - part.labels.begin())].push_back(Eigen::Index(j));
  }
  return part;
}

std::pair<std::size_t, std::size_t> order_two_groups(const GroupPartition& part,
                                                     const std::optional<std::string>& reference) {
  if (part.labels.size() != 2) throw validation_error("expected exactly 2 groups");
  if (!reference) return {0, 1};
  if (*reference == part.labels[0]) return {0, 1};
  if (*reference == part.labels[1]) return {1, 0};
  throw validation_error("reference group '" + *reference + "' not present in metadata");
}

std::pair<AbundanceTable, SampleMetadata> subset_samples(const AbundanceTable& table,
                                                         const SampleMetadata& meta,
                                                         const std::vector<Eigen::Index>& columns) {
  AbundanceTable out;
  out.feature_ids = table.feature_ids;
  out.kind = table.kind;
  out.values.resize(table.n_features(), Eigen::Index(columns.size()));
  SampleMetadata out_meta;
  for (const auto& [name, values] : meta.covariates) out_meta.covariates[name] = {};
  Eigen::Index dest = 0;
  for (Eigen::Index src : columns) {
    out.sample_ids.push_back(table.sample_ids[std::size_t(src)]);
    out.values.col(dest++) = table.values.col(src);
    out_meta.sample_ids.push_back(meta.sample_ids[std::size_t(src)]);
    out_meta.groups.push_back(meta.groups[std::size_t(src)]);
    for (const auto& [name, values] : meta.covariates) {
      out_meta.covariates[name].push_back(values[std::size_t(src)]);
    }
  }
  return {std::move(out), std::move(out_meta)};
}

double log2_fold_change(const Eigen::MatrixXd& relative, Eigen::Index feature,
                        const std::vector<Eigen::Index>& group1,
                        const std::vector<Eigen::Index>& group2) {
  constexpr double eps = 1e-10;
  auto mean_of = [&](const std::vector<Eigen::Index>& cols) {
    double acc = 0.0;
    for (Eigen::Index c : cols) acc += relative(feature, c);
    return acc / double(cols.size());
  };
  return std::log2((mean_of(group1) + eps) / (mean_of(group2) + eps));
}

namespace {

std::string format_or_na(double value) {
  return std::isnan(value) ? "NA" : text::format_full(value);
}

}  // namespace

void write_daa_results(const std::vector<DaaResultRecord>& records, std::ostream& out) {
  out << "feature\tmethod\tgroup1\tgroup2\teffect\tlog2_fold_change\tp_value\tadjusted_p\t"
         "adjust_method\tnote\n";
  for (const auto& r : records) {
    out << r.feature_id << '\t' << r.method << '\t' << r.group1 << '\t' << r.group2 << '\t'
        << format_or_na(r.effect) << '\t' << format_or_na(r.log2_fold_change) << '\t'
        << text::format_full(r.p_value) << '\t' << text::format_full(r.adjusted_p) << '\t'
        << r.adjust_method << '\t' << r.note << '\n';
  }
}

void write_consensus(const std::vector<ConsensusRow>& rows, std::ostream& out) {
  out << "feature\tgroup1\tgroup2\tn_methods\tn_significant\tconsensus_flag\tmedian_adjusted_p";
  if (!rows.empty()) {
    for (const auto& [method, p] : rows.front().adjusted_p_by_method) out << "\tadjp_" << method;
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.feature_id << '\t' << row.group1 << '\t' << row.group2 << '\t'
        << row.adjusted_p_by_method.size() << '\t' << row.n_significant << '\t'
        << (row.consensus_flag ? "yes" : "no") << '\t' << text::format_full(row.median_adjusted_p);
    for (const auto& [method, p] : row.adjusted_p_by_method) out << '\t' << text::format_full(p);
    out << '\n';
  }
}

std::vector<ConsensusRow> consensus_daa(const std::map<std::string, std::vector<DaaResultRecord>>& results,
                                        double alpha, int min_agree) {
  if (results.empty()) throw validation_error("consensus_daa: no method results given");
  if (min_agree < 1 || std::size_t(min_agree) > results.size()) {
    throw validation_error("consensus_daa: min_agree must be in [1, number of methods]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw validation_error("consensus_daa: alpha must be in (0,1)");

  // Feature sets must agree across methods; report the symmetric difference.
  const auto& first = results.begin()->second;
  std::set<std::string> reference;
  for (const auto& r : first) reference.insert(r.feature_id);
  std::string pair_g1 = first.empty() ? "" : first.front().group1;
  std::string pair_g2 = first.empty() ? "" : first.front().group2;

  for (const auto& [method, records] : results) {
    std::set<std::string> here;
    for (const auto& r : records) {
      here.insert(r.feature_id);
      if (r.group1 != pair_g1 || r.group2 != pair_g2) {
        throw validation_error("consensus_daa: method '" + method +
                               "' covers a different group pair (" + r.group1 + " vs " + r.group2 +
                               ", expected " + pair_g1 + " vs " + pair_g2 + ")");
      }
    }
    std::vector<std::string> diff;
    std::set_symmetric_difference(reference.begin(), reference.end(), here.begin(), here.end(),
                                  std::back_inserter(diff));
    if (!diff.empty()) {
      throw validation_error("consensus_daa: feature sets differ between methods; offending ids: " +
                             text::join(diff, ", "));
    }
  }

  std::vector<ConsensusRow> rows;
  for (const auto& feature : reference) {
    ConsensusRow row;
    row.feature_id = feature;
    row.group1 = pair_g1;
    row.group2 = pair_g2;
    std::vector<double> adjusted;
    for (const auto& [method, records] : results) {
      const auto it = std::find_if(records.begin(), records.end(),
                                   [&](const DaaResultRecord& r) { return r.feature_id == feature; });
      row.adjusted_p_by_method[method] = it->adjusted_p;
      adjusted.push_back(it->adjusted_p);
      if (it->adjusted_p <= alpha) ++row.n_significant;
    }
    std::sort(adjusted.begin(), adjusted.end());
    const std::size_t n = adjusted.size();
    row.median_adjusted_p =
        n % 2 ? adjusted[n / 2] : 0.5 * (adjusted[n / 2 - 1] + adjusted[n / 2]);
    row.consensus_flag = row.n_significant >= min_agree;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ConsensusRow& a, const ConsensusRow& b) {
    if (a.median_adjusted_p != b.median_adjusted_p) return a.median_adjusted_p < b.median_adjusted_p;
    return a.feature_id < b.feature_id;
  });
  return rows;
}

}  // namespace picrustkit::daa
