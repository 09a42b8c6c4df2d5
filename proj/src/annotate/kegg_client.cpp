#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "picrustkit/annotate/annotation.hpp"
#include "picrustkit/core/diag.hpp"
#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"

// httplib drags in resolv.h, whose _res macro corrupts Eigen headers; keep
// this include after every project header. TLS support comes from the
// build-wide CPPHTTPLIB_OPENSSL_SUPPORT definition.
#include <httplib.h>

namespace picrustkit::annotate {

namespace {

constexpr std::size_t kKeywordWidth = 12;

bool keyword_like(const std::string& s) {
  for (char c : s) {
    if (!std::isupper(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return !s.empty();
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("XDG_CACHE_HOME"); env && *env) {
    return std::filesystem::path(env) / "picrustkit" / "kegg";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "picrustkit" / "kegg";
  }
  return std::filesystem::temp_directory_path() / "picrustkit-kegg-cache";
}

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

bool network_disabled_by_env() {
  const char* env = std::getenv("PICRUSTKIT_NO_NETWORK");
  return env && *env;
}

AnnotationRecord KeggClient::parse_flat_file(const std::string& body, const std::string& id) {
  AnnotationRecord record;
  record.feature_id = id;
  record.source = "kegg_rest";

  std::string current_keyword;
  std::vector<std::string> description_parts;
  std::istringstream in(body);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("///", 0) == 0) break;
    if (line.empty()) continue;

    const std::string head =
        std::string(text::trim(line.substr(0, std::min(kKeywordWidth, line.size()))));
    const std::string content =
        line.size() > kKeywordWidth ? line.substr(kKeywordWidth) : std::string();

    if (!head.empty()) {
      if (!keyword_like(head)) {
        throw validation_error("KEGG flat file for '" + id + "': malformed keyword at line " +
                               std::to_string(line_number) + ": '" + line + "'");
      }
      current_keyword = head;
    } else if (current_keyword.empty()) {
      throw validation_error("KEGG flat file for '" + id + "': continuation before any keyword at line " +
                             std::to_string(line_number) + ": '" + line + "'");
    }

    const std::string value = std::string(text::trim(content));
    if (value.empty()) continue;
    if (current_keyword == "NAME") {
      if (!record.pathway_name) record.pathway_name = value;
    } else if (current_keyword == "DESCRIPTION") {
      description_parts.push_back(value);
    } else if (current_keyword == "CLASS") {
      if (!record.pathway_class) record.pathway_class = value;
    } else if (current_keyword == "PATHWAY_MAP") {
      if (!record.pathway_map) record.pathway_map = text::split(value, ' ').front();
    }
  }
  if (!description_parts.empty()) {
    record.pathway_description = text::join(description_parts, " ");
  }
  return record;
}

KeggClient::KeggClient(KeggClientConfig config,
                       const std::map<std::string, AnnotationRecord>* offline_fallback)
    : config_(std::move(config)), offline_(offline_fallback) {
  if (config_.cache_dir.empty()) config_.cache_dir = default_cache_dir();
  std::filesystem::create_directories(config_.cache_dir);
}

std::optional<AnnotationRecord> KeggClient::from_cache(const std::string& id) {
  const auto body_path = config_.cache_dir / (id + ".txt");
  std::ifstream in(body_path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  AnnotationRecord record = parse_flat_file(buffer.str(), id);

  std::ifstream meta(config_.cache_dir / (id + ".meta"));
  std::string line;
  while (std::getline(meta, line)) {
    if (text::starts_with(line, "fetched_at=")) {
      record.fetched_at = line.substr(std::string("fetched_at=").size());
    }
  }
  return record;
}

void KeggClient::store_cache(const std::string& id, const std::string& body) {
  // write-temp-then-rename keeps partially written entries out of the cache
  const auto tmp = config_.cache_dir / (id + ".txt.tmp");
  const auto final_path = config_.cache_dir / (id + ".txt");
  {
    std::ofstream out(tmp, std::ios::binary);
    out << body;
  }
  std::filesystem::rename(tmp, final_path);

  const auto meta_tmp = config_.cache_dir / (id + ".meta.tmp");
  {
    std::ofstream out(meta_tmp);
    out << "fetched_at=" << now_iso8601() << "\n";
    out << "url=" << config_.base_url << "/get/" << id << "\n";
  }
  std::filesystem::rename(meta_tmp, config_.cache_dir / (id + ".meta"));
}

AnnotationRecord KeggClient::offline_or_empty(const std::string& id, const std::string& why) {
  if (offline_) {
    const auto it = offline_->find(id);
    if (it != offline_->end() && it->second.annotated()) {
      diag::warn("KEGG fetch for '" + id + "' failed (" + why + "); using the offline table");
      return it->second;
    }
  }
  diag::warn("KEGG fetch for '" + id + "' failed (" + why + "); leaving it unannotated");
  AnnotationRecord record;
  record.feature_id = id;
  record.source = "kegg_rest";
  return record;
}

void KeggClient::respect_rate_limit() {
  const auto now = std::chrono::steady_clock::now();
  if (any_request_) {
    const auto next_allowed = last_request_ + config_.min_request_interval;
    if (now < next_allowed) std::this_thread::sleep_for(next_allowed - now);
  }
  last_request_ = std::chrono::steady_clock::now();
  any_request_ = true;
}

AnnotationRecord KeggClient::fetch(const std::string& pathway_id) {
  if (!is_kegg_pathway_id(pathway_id)) {
    throw validation_error("KEGG fetch: '" + pathway_id + "' is not a pathway id (ko#####)");
  }
  if (auto cached = from_cache(pathway_id)) return *cached;
  if (!config_.enable_network || network_disabled_by_env()) {
    return offline_or_empty(pathway_id, "networking disabled");
  }

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(30, 0);

  std::string failure = "unreachable";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
    }
    respect_rate_limit();
    ++network_requests_;
    auto response = client.Get("/get/" + pathway_id);
    if (!response) {
      failure = httplib::to_string(response.error());
      continue;
    }
    if (response->status == 404) {
      diag::warn("KEGG has no record for '" + pathway_id + "' (HTTP 404)");
      AnnotationRecord record;
      record.feature_id = pathway_id;
      record.source = "kegg_rest";
      return record;
    }
    if (response->status != 200) {
      failure = "HTTP " + std::to_string(response->status);
      continue;
    }
    AnnotationRecord record = parse_flat_file(response->body, pathway_id);
    record.fetched_at = now_iso8601();
    store_cache(pathway_id, response->body);
    return record;
  }
  return offline_or_empty(pathway_id, failure + " after " + std::to_string(config_.max_retries) +
                                           " retries");
}

}  // namespace picrustkit::annotate
