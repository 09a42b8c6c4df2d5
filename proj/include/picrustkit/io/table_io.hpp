#ifndef PICRUSTKIT_IO_TABLE_IO_HPP
#define PICRUSTKIT_IO_TABLE_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "picrustkit/io/abundance_table.hpp"

namespace picrustkit {

// PICRUSt2-style tables: first row is the header, first column is always the
// feature id regardless of its header text. Tab-delimited for .tsv/.txt,
// comma for .csv. Leading '#' comment lines are skipped, except a '#OTU ID'
// header line.
AbundanceTable parse_abundance_table(const std::filesystem::path& path,
                                     std::optional<FeatureKind> kind_hint = std::nullopt);
AbundanceTable parse_abundance_table(std::istream& in, char delimiter,
                                     std::optional<FeatureKind> kind_hint = std::nullopt);

// Canonical TSV writer: header 'function' + sample ids, 17-significant-digit
// reals, LF line endings. Re-parsing the output reproduces the table
// bit-exactly.
void write_abundance_table(const AbundanceTable& table, std::ostream& out);
void write_abundance_table(const AbundanceTable& table, const std::filesystem::path& path);

// Sample ids come from the first column; group labels are trimmed. Covariate
// columns, when requested, must parse as numbers.
SampleMetadata parse_metadata(const std::filesystem::path& path, const std::string& group_column,
                              const std::vector<std::string>& covariate_columns = {});
SampleMetadata parse_metadata(std::istream& in, char delimiter, const std::string& group_column,
                              const std::vector<std::string>& covariate_columns = {});

// Restricts both sides to the shared samples, ordered by ascending
// lexicographic sample id. That canonical order is what keeps Monte Carlo
// substreams stable under input column permutations. Warns about dropped
// samples; an empty intersection is a hard error.
std::pair<AbundanceTable, SampleMetadata> align_samples(const AbundanceTable& table,
                                                        const SampleMetadata& meta);

char delimiter_for_path(const std::filesystem::path& path);

}  // namespace picrustkit

#endif  // PICRUSTKIT_IO_TABLE_IO_HPP
