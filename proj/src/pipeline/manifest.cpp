#include "picrustkit/pipeline/manifest.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"

#ifndef PICRUSTKIT_VERSION
#define PICRUSTKIT_VERSION "0.0.0"
#endif

namespace picrustkit::pipeline {

std::string tool_version() { return PICRUSTKIT_VERSION; }

namespace {

std::string hex_digest(const unsigned char* digest, unsigned length) {
  static const char* hexdigits = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned i = 0; i < length; ++i) {
    out += hexdigits[digest[i] >> 4];
    out += hexdigits[digest[i] & 0xF];
  }
  return out;
}

}  // namespace

std::string sha256_bytes(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned length = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr)) {
    throw std::runtime_error("sha256: digest computation failed");
  }
  return hex_digest(digest, length);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("sha256: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_bytes(buffer.str());
}

std::string build_manifest(const PipelineConfig& config,
                           const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                           const std::vector<std::pair<std::string, std::filesystem::path>>& artifacts,
                           const std::string& data_provenance) {
  nlohmann::ordered_json manifest;
  manifest["tool"] = "picrustkit";
  manifest["version"] = tool_version();
  manifest["reference_data"] = data_provenance;

  nlohmann::ordered_json inputs_json;
  for (const auto& [name, path] : inputs) {
    inputs_json[name] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  }
  manifest["inputs"] = inputs_json;

  nlohmann::ordered_json config_json;
  config_json["group_column"] = config.group_column;
  config_json["feature_kind"] =
      config.feature_kind ? feature_kind_name(*config.feature_kind) : "auto";
  config_json["convert_ko_to_kegg"] = config.convert_ko_to_kegg;
  config_json["methods"] = config.methods;
  config_json["p_adjust"] = config.p_adjust;
  config_json["alpha"] = config.alpha;
  config_json["seed"] = config.seed;
  config_json["annotation_mode"] = config.annotation_mode;
  config_json["reference_group"] =
      config.reference_group ? nlohmann::ordered_json(*config.reference_group)
                             : nlohmann::ordered_json(nullptr);
  config_json["covariates"] = config.covariates;
  config_json["mc_instances"] = config.mc_instances;
  config_json["pseudo_count"] = config.pseudo_count;
  config_json["min_agree"] = config.effective_min_agree();
  config_json["max_features"] = config.max_features;
  config_json["sort_by"] = config.sort_by;
  config_json["show_error_bars"] = config.show_error_bars;
  manifest["config"] = config_json;

  nlohmann::ordered_json artifacts_json;
  for (const auto& [name, path] : artifacts) {
    artifacts_json[name] = sha256_file(path);
  }
  manifest["artifacts"] = artifacts_json;

  return manifest.dump(2) + "\n";
}

}  // namespace picrustkit::pipeline
