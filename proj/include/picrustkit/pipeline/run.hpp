#ifndef PICRUSTKIT_PIPELINE_RUN_HPP
#define PICRUSTKIT_PIPELINE_RUN_HPP

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "picrustkit/annotate/annotation.hpp"
#include "picrustkit/daa/daa.hpp"
#include "picrustkit/pipeline/config.hpp"

namespace picrustkit::pipeline {

// Reads back a DA results TSV written by write_daa_results.
std::vector<daa::DaaResultRecord> read_daa_results(const std::filesystem::path& path);

// Appends (or refreshes) annotation columns on any TSV whose first column is
// a feature id: abundance tables, DA results, consensus tables. Re-running on
// annotated output is a no-op byte-wise.
void annotate_table_file(const std::filesystem::path& input, std::ostream& out,
                         std::optional<FeatureKind> kind, annotate::AnnotationMode mode,
                         const annotate::KeggClientConfig& client_config,
                         const std::optional<std::filesystem::path>& table_path = std::nullopt);

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<std::string> artifacts;  // file names inside output_dir
};

// The integration pipeline: parse -> align -> optional KO-to-pathway
// conversion -> DA for every configured method -> consensus -> annotation ->
// the three figures -> manifest. Outputs are staged in a temp directory and
// promoted only when every stage succeeded.
RunResult run_pipeline(const PipelineConfig& config);

}  // namespace picrustkit::pipeline

#endif  // PICRUSTKIT_PIPELINE_RUN_HPP
