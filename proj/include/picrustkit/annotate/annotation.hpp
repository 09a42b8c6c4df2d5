#ifndef PICRUSTKIT_ANNOTATE_ANNOTATION_HPP
#define PICRUSTKIT_ANNOTATE_ANNOTATION_HPP

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "picrustkit/io/abundance_table.hpp"

namespace picrustkit::annotate {

struct AnnotationRecord {
  std::string feature_id;
  std::optional<std::string> pathway_name;
  std::optional<std::string> pathway_description;
  std::optional<std::string> pathway_class;  // "top-level class; subclass"
  std::optional<std::string> pathway_map;
  std::string source = "offline";  // "offline" or "kegg_rest"
  std::optional<std::string> fetched_at;

  bool annotated() const {
    return pathway_name || pathway_description || pathway_class || pathway_map;
  }
  // Grouping key for plots: the substring before the first ';'.
  std::string class_group() const;
};

// Offline lookup tables, TSV: id, name, description, class, map ('#'
// comments, empty cells allowed). With no path, loads the bundled table for
// the kind. Duplicate ids: last wins, with a warning.
std::map<std::string, AnnotationRecord> load_annotation_table(
    FeatureKind kind, const std::optional<std::filesystem::path>& path = std::nullopt);

enum class AnnotationMode { offline, kegg_rest, auto_mode };

const char* annotation_mode_name(AnnotationMode mode);
AnnotationMode annotation_mode_from_name(const std::string& name);

struct KeggClientConfig {
  std::string base_url = "https://rest.kegg.jp";
  std::filesystem::path cache_dir;  // empty: <data response cache>/kegg under the user cache dir
  bool enable_network = true;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  // Conservative spacing between request starts; comfortably under the
  // documented 3 requests/second ceiling.
  std::chrono::milliseconds min_request_interval{450};
};

// True when PICRUSTKIT_NO_NETWORK is set (any non-empty value): all network
// fetches are disabled regardless of configuration.
bool network_disabled_by_env();

// Flat-file client for pathway records. Keyword detection is positional:
// columns 1-12 carry the uppercase field name, continuation lines are blank
// there. Responses are cached on disk (verbatim body + timestamp sidecar) and
// the cache is consulted before the network.
class KeggClient {
 public:
  explicit KeggClient(KeggClientConfig config,
                      const std::map<std::string, AnnotationRecord>* offline_fallback = nullptr);

  // GET <base_url>/get/<pathway_id>. 404 yields an unannotated record with a
  // warning; repeated network failure falls back to the offline table.
  AnnotationRecord fetch(const std::string& pathway_id);

  std::size_t network_requests() const { return network_requests_; }

  static AnnotationRecord parse_flat_file(const std::string& body, const std::string& id);

 private:
  std::optional<AnnotationRecord> from_cache(const std::string& id);
  void store_cache(const std::string& id, const std::string& body);
  AnnotationRecord offline_or_empty(const std::string& id, const std::string& why);
  void respect_rate_limit();

  KeggClientConfig config_;
  const std::map<std::string, AnnotationRecord>* offline_;
  std::chrono::steady_clock::time_point last_request_{};
  bool any_request_ = false;
  std::size_t network_requests_ = 0;
};

// Annotates ids in order. offline uses tables only; kegg_rest uses the
// network (KEGG pathways only) with offline fallback; auto tries offline
// first and fetches the misses.
std::vector<AnnotationRecord> annotate_features(
    const std::vector<std::string>& ids, FeatureKind kind, AnnotationMode mode,
    const KeggClientConfig& client_config = {},
    const std::optional<std::filesystem::path>& table_path = std::nullopt);

}  // namespace picrustkit::annotate

#endif  // PICRUSTKIT_ANNOTATE_ANNOTATION_HPP
