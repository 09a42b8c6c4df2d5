// Regenerates the bundled demo dataset (data/demo/): a Dirichlet-multinomial
// KO abundance table of 50 features x 20 samples in two groups of 10.
//
// Five KOs that belong to the neurodegeneration pathways ko05016 / ko05012 in
// the bundled reference map (K04533, K05208, K04528, K04556, K08738) carry an
// 8-fold higher relative weight in the "Case" group, so the converted pathway
// table shows a strong, recoverable group difference in exactly those
// pathways. Everything is drawn from the project RNG with a fixed seed; the
// committed files are byte-reproducible with this tool.
//
// Usage: make-demo [output-dir]   (default: data/demo)

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "picrustkit/core/rng.hpp"
#include "picrustkit/io/table_io.hpp"

namespace {

constexpr std::uint64_t kSeed = 20230515;
constexpr double kConcentration = 300.0;  // Dirichlet total; lower = noisier samples
constexpr int kDepth = 50000;             // reads per sample
constexpr double kSpikeFold = 8.0;

struct DemoFeature {
  const char* id;
  double weight;
  bool spiked;
};

// Base composition weights; spiked features sit in ko05016/ko05012.
const std::vector<DemoFeature> kFeatures = {
    // glycolysis
    {"K00844", 2.0, false}, {"K01810", 1.6, false}, {"K00850", 1.2, false},
    {"K01623", 1.4, false}, {"K01803", 2.2, false}, {"K00134", 2.8, false},
    {"K00927", 2.4, false}, {"K01834", 1.8, false}, {"K01689", 2.0, false},
    {"K00873", 1.5, false},
    // citrate cycle
    {"K01647", 1.2, false}, {"K01681", 1.4, false}, {"K00031", 1.1, false},
    {"K01902", 0.9, false}, {"K01903", 0.9, false}, {"K00234", 0.8, false},
    {"K01676", 1.0, false}, {"K00024", 2.6, false},
    // pentose phosphate
    {"K00036", 1.0, false}, {"K00033", 0.9, false}, {"K01783", 0.8, false},
    {"K01807", 1.1, false},
    // oxidative phosphorylation
    {"K00330", 1.3, false}, {"K00331", 1.3, false}, {"K00332", 1.2, false},
    {"K00333", 1.1, false}, {"K02274", 1.0, false}, {"K02275", 1.0, false},
    {"K02276", 0.9, false}, {"K02111", 1.8, false}, {"K02112", 1.7, false},
    // pyruvate metabolism
    {"K00016", 1.9, false}, {"K00027", 0.8, false},
    // nitrogen metabolism
    {"K00260", 1.1, false}, {"K00265", 0.9, false}, {"K01915", 1.6, false},
    // transporters and motility
    {"K02003", 1.4, false}, {"K02004", 1.3, false}, {"K02406", 0.5, false},
    {"K02407", 0.4, false},
    // ribosome
    {"K02863", 2.1, false}, {"K02945", 2.2, false}, {"K02864", 1.9, false},
    // neurodegeneration pathway members
    {"K04533", 0.80, true},   // ko05016
    {"K05208", 0.70, true},   // ko05016 (shared with other neuro maps)
    {"K04498", 0.15, false},  // ko05016, unspiked member
    {"K04528", 0.75, true},   // ko05012
    {"K04556", 0.65, true},   // ko05012
    {"K05688", 0.20, false},  // ko05012, unspiked member
    {"K08738", 0.60, true},   // shared ko05016 + ko05012
};

}  // namespace

int main(int argc, char** argv) {
  using namespace picrustkit;

  const std::filesystem::path out_dir = argc > 1 ? argv[1] : "data/demo";
  std::filesystem::create_directories(out_dir);

  const int n_per_group = 10;
  const Eigen::Index n_features = Eigen::Index(kFeatures.size());

  AbundanceTable table;
  table.kind = FeatureKind::ko;
  for (const auto& f : kFeatures) table.feature_ids.push_back(f.id);
  table.values.resize(n_features, 2 * n_per_group);

  std::ofstream meta(out_dir / "demo_metadata.tsv", std::ios::binary);
  meta << "sample-id\tGroup\n";

  for (int s = 0; s < 2 * n_per_group; ++s) {
    const bool case_group = s >= n_per_group;
    char sample_id[8];
    std::snprintf(sample_id, sizeof sample_id, "S%02d", s + 1);
    table.sample_ids.push_back(sample_id);
    meta << sample_id << '\t' << (case_group ? "Case" : "Control") << '\n';

    Eigen::VectorXd alpha(n_features);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n_features; ++i) {
      double w = kFeatures[std::size_t(i)].weight;
      if (case_group && kFeatures[std::size_t(i)].spiked) w *= kSpikeFold;
      alpha[i] = w;
      total += w;
    }
    alpha *= kConcentration / total;

    Rng rng = Rng::substream(kSeed, std::uint64_t(s), 0);
    const Eigen::VectorXd theta = rng.dirichlet(alpha);

    // Multinomial(depth, theta) by cumulative inversion.
    Eigen::VectorXd cumulative(n_features);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n_features; ++i) {
      acc += theta[i];
      cumulative[i] = acc;
    }
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_features);
    for (int read = 0; read < kDepth; ++read) {
      const double u = rng.uniform() * acc;
      Eigen::Index lo = 0, hi = n_features - 1;
      while (lo < hi) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (u <= cumulative[mid]) hi = mid;
        else lo = mid + 1;
      }
      counts[lo] += 1.0;
    }
    table.values.col(s) = counts;
  }

  write_abundance_table(table, out_dir / "demo_ko_abundance.tsv");
  std::cout << "wrote " << (out_dir / "demo_ko_abundance.tsv").string() << " and "
            << (out_dir / "demo_metadata.tsv").string() << "\n";
  return 0;
}
