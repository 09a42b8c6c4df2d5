#ifndef PICRUSTKIT_KEGG_KO_PATHWAY_MAP_HPP
#define PICRUSTKIT_KEGG_KO_PATHWAY_MAP_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "picrustkit/io/abundance_table.hpp"

namespace picrustkit {

// Pathway -> member KO sets. Many-to-many: a KO may sit in any number of
// pathways. The map file is TSV: 'pathway_id<TAB>K00001,K00002,...' with '#'
// comment lines; a '# provenance:' comment is kept as the provenance string.
struct KoToPathwayMap {
  std::map<std::string, std::set<std::string>> entries;  // pathway id -> member KOs
  std::string provenance;

  std::size_t pathway_count() const { return entries.size(); }
  std::size_t ko_count() const;
  std::size_t max_pathways_per_ko() const;
};

// Loads and validates a map file; with no path, loads the reference snapshot
// bundled with the toolkit.
KoToPathwayMap load_ko_map(const std::optional<std::filesystem::path>& path = std::nullopt);
KoToPathwayMap parse_ko_map(std::istream& in);

struct PathwayMatch {
  std::string pathway_id;
  std::size_t matched_members = 0;
  std::size_t total_members = 0;
};

struct Ko2KeggResult {
  AbundanceTable table;                 // kind = KEGG_PATHWAY, all-zero rows dropped
  std::vector<PathwayMatch> report;     // per surviving pathway, ascending id
  std::vector<std::string> dropped;     // pathways with no signal, ascending id
};

// Sums member-KO abundances per pathway. Per-pathway summation order is
// ascending KO id, so results are exact and independent of input order.
Ko2KeggResult ko2kegg_abundance(const AbundanceTable& ko_table, const KoToPathwayMap& map);

// Default location of the bundled reference data directory. Honors the
// PICRUSTKIT_DATA_DIR environment variable.
std::filesystem::path default_data_dir();

}  // namespace picrustkit

#endif  // PICRUSTKIT_KEGG_KO_PATHWAY_MAP_HPP
