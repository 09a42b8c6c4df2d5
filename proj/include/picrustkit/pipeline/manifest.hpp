#ifndef PICRUSTKIT_PIPELINE_MANIFEST_HPP
#define PICRUSTKIT_PIPELINE_MANIFEST_HPP

#include <filesystem>
#include <string>

#include "picrustkit/pipeline/config.hpp"

namespace picrustkit::pipeline {

std::string tool_version();

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(const std::string& bytes);

// Reproducibility manifest: tool version, reference-data provenance, input
// checksums, the effective configuration, and one checksum per artifact.
// Deliberately carries no timestamps so two identical runs write identical
// manifests.
std::string build_manifest(const PipelineConfig& config,
                           const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                           const std::vector<std::pair<std::string, std::filesystem::path>>& artifacts,
                           const std::string& data_provenance);

}  // namespace picrustkit::pipeline

#endif  // PICRUSTKIT_PIPELINE_MANIFEST_HPP
