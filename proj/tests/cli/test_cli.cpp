#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "test_support.hpp"

// End-to-end checks through the installed binary. Everything runs with
// networking force-disabled; offline behavior is part of the contract.

namespace {

using test_support::CommandResult;
using test_support::TempDir;

#ifndef PICRUSTKIT_BIN
#define PICRUSTKIT_BIN "picrustkit"
#endif

std::string binary() { return PICRUSTKIT_BIN; }

std::filesystem::path demo_table() { return test_support::data_dir() / "demo" / "demo_ko_abundance.tsv"; }
std::filesystem::path demo_metadata() { return test_support::data_dir() / "demo" / "demo_metadata.tsv"; }

CommandResult run_cli(const std::string& args) {
  return test_support::run_command("PICRUSTKIT_NO_NETWORK=1 PICRUSTKIT_DATA_DIR=" +
                                   test_support::data_dir().string() + " " + binary() + " " + args);
}

}  // namespace

TEST_CASE("version prints the tool version and data provenance") {
  const auto result = run_cli("--version");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("picrustkit") != std::string::npos);
  CHECK(result.output.find("reference data") != std::string::npos);
}

TEST_CASE("convert wraps the mapping module") {
  TempDir dir("cli-convert");
  const auto out = dir.path() / "kegg.tsv";
  const auto result =
      run_cli("convert -i " + demo_table().string() + " -o " + out.string());
  CHECK(result.exit_code == 0);
  CHECK(std::filesystem::exists(out));
  CHECK(result.output.find("pathway=ko05016") != std::string::npos);  // conversion report

  // a custom --map is honored
  const auto map = test_support::write_file(dir.path() / "map.tsv", "ko00010\tK00844,K00850\n");
  const auto custom = dir.path() / "custom.tsv";
  const auto with_map = run_cli("convert -i " + demo_table().string() + " -o " + custom.string() +
                                " --map " + map.string());
  CHECK(with_map.exit_code == 0);
  const auto body = test_support::slurp(custom);
  CHECK(body.find("ko00010") != std::string::npos);
  CHECK(body.find("ko00020") == std::string::npos);
}

TEST_CASE("bad input path exits 2 with a message") {
  const auto result = run_cli("convert -i /nonexistent/path.tsv -o /tmp/x.tsv");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("error") != std::string::npos);
}

TEST_CASE("unknown DA method exits 2 and lists valid ones") {
  TempDir dir("cli-badmethod");
  const auto result = run_cli("daa -i " + demo_table().string() + " -m " +
                              demo_metadata().string() +
                              " -g Group --methods sorcery --output-dir " + dir.path().string());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("welch_t") != std::string::npos);
  CHECK(result.output.find("linda") != std::string::npos);
}

TEST_CASE("daa writes one file per method plus a consensus") {
  TempDir dir("cli-daa");
  const auto result = run_cli("daa -i " + demo_table().string() + " -m " +
                              demo_metadata().string() +
                              " -g Group --methods welch_t,wilcoxon,linda --seed 7 --output-dir " +
                              dir.path().string());
  CHECK(result.exit_code == 0);
  for (const char* name : {"daa_welch_t.tsv", "daa_wilcoxon.tsv", "daa_linda.tsv", "consensus.tsv"}) {
    CHECK(std::filesystem::exists(dir.path() / name));
  }
  const auto header = test_support::slurp(dir.path() / "daa_welch_t.tsv");
  CHECK(header.rfind("feature\tmethod\tgroup1\tgroup2\teffect\tlog2_fold_change\tp_value\t"
                     "adjusted_p\tadjust_method\tnote",
                     0) == 0);
}

TEST_CASE("aldex2 without an explicit seed warns and defaults") {
  TempDir dir("cli-seedwarn");
  const auto result =
      run_cli("daa -i " + demo_table().string() + " -m " + demo_metadata().string() +
              " -g Group --methods aldex2 --mc-instances 8 --output-dir " + dir.path().string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("seed") != std::string::npos);
}

TEST_CASE("same seed reruns are byte-identical") {
  TempDir a("cli-rerun-a"), b("cli-rerun-b");
  const std::string common = "daa -i " + demo_table().string() + " -m " + demo_metadata().string() +
                             " -g Group --methods aldex2,linda --seed 11 --mc-instances 16 "
                             "--output-dir ";
  CHECK(run_cli(common + a.path().string()).exit_code == 0);
  CHECK(run_cli(common + b.path().string()).exit_code == 0);
  for (const char* name : {"daa_aldex2.tsv", "daa_linda.tsv", "consensus.tsv"}) {
    CHECK(test_support::slurp(a.path() / name) == test_support::slurp(b.path() / name));
  }
}

TEST_CASE("annotate appends columns offline and is idempotent") {
  TempDir dir("cli-annot");
  const auto once = dir.path() / "once.tsv";
  const auto twice = dir.path() / "twice.tsv";
  auto result = run_cli("convert -i " + demo_table().string() + " -o " + (dir.path() / "k.tsv").string());
  REQUIRE(result.exit_code == 0);
  result = run_cli("annotate -i " + (dir.path() / "k.tsv").string() + " -o " + once.string());
  CHECK(result.exit_code == 0);
  const auto body = test_support::slurp(once);
  CHECK(body.find("pathway_name") != std::string::npos);
  CHECK(body.find("Huntington disease") != std::string::npos);

  result = run_cli("annotate -i " + once.string() + " -o " + twice.string());
  CHECK(result.exit_code == 0);
  CHECK(test_support::slurp(twice) == body);  // idempotent
}

TEST_CASE("annotate works on DA results tables") {
  TempDir dir("cli-annot-daa");
  auto result = run_cli("convert -i " + demo_table().string() + " -o " + (dir.path() / "k.tsv").string());
  REQUIRE(result.exit_code == 0);
  result = run_cli("daa -i " + (dir.path() / "k.tsv").string() + " -m " + demo_metadata().string() +
                   " -g Group --methods welch_t --output-dir " + dir.path().string());
  REQUIRE(result.exit_code == 0);
  result = run_cli("annotate -i " + (dir.path() / "daa_welch_t.tsv").string() + " -o " +
                   (dir.path() / "annotated.tsv").string());
  CHECK(result.exit_code == 0);
  const auto body = test_support::slurp(dir.path() / "annotated.tsv");
  CHECK(body.find("Huntington disease") != std::string::npos);
  CHECK(body.find("adjust_method") != std::string::npos);  // original columns kept
}

TEST_CASE("plot subcommands render SVGs and enforce preconditions") {
  TempDir dir("cli-plot");
  const auto kegg = (dir.path() / "k.tsv").string();
  REQUIRE(run_cli("convert -i " + demo_table().string() + " -o " + kegg).exit_code == 0);
  REQUIRE(run_cli("daa -i " + kegg + " -m " + demo_metadata().string() +
                  " -g Group --methods welch_t --output-dir " + dir.path().string())
              .exit_code == 0);

  const auto errorbar = dir.path() / "e.svg";
  auto result = run_cli("plot errorbar -i " + kegg + " -m " + demo_metadata().string() +
                        " -g Group --daa " + (dir.path() / "daa_welch_t.tsv").string() + " -o " +
                        errorbar.string() + " --sort-by class_then_p");
  CHECK(result.exit_code == 0);
  const auto svg = test_support::slurp(errorbar);
  CHECK(test_support::xml_problem(svg).empty());
  CHECK(svg.find("Huntington") != std::string::npos);

  result = run_cli("plot pca -i " + kegg + " -m " + demo_metadata().string() + " -g Group -o " +
                   (dir.path() / "p.svg").string());
  CHECK(result.exit_code == 0);
  CHECK(test_support::xml_problem(test_support::slurp(dir.path() / "p.svg")).empty());

  result = run_cli("plot heatmap -i " + kegg + " -m " + demo_metadata().string() +
                   " -g Group --features ko05016,ko05012 -o " + (dir.path() / "h.svg").string());
  CHECK(result.exit_code == 0);

  result = run_cli("plot heatmap -i " + kegg + " -m " + demo_metadata().string() +
                   " -g Group --features nosuch -o " + (dir.path() / "x.svg").string());
  CHECK(result.exit_code == 2);

  // two samples are not enough for a PCA plot
  const auto tiny = test_support::write_file(dir.path() / "tiny.tsv",
                                             "function\tS01\tS02\nK00001\t1\t2\nK00002\t3\t4\n");
  const auto tiny_meta = test_support::write_file(dir.path() / "tinym.tsv",
                                                  "sample-id\tGroup\nS01\tA\nS02\tB\n");
  result = run_cli("plot pca -i " + tiny.string() + " -m " + tiny_meta.string() + " -g Group -o " +
                   (dir.path() / "t.svg").string());
  CHECK(result.exit_code == 2);
}

TEST_CASE("run produces the full artifact set with reproducible checksums") {
  TempDir a("cli-run-a"), b("cli-run-b");
  const std::string common = "run -i " + demo_table().string() + " -m " + demo_metadata().string() +
                             " -g Group --seed 42 --mc-instances 32 --output-dir ";
  auto result = run_cli(common + a.path().string());
  REQUIRE(result.exit_code == 0);
  for (const char* name :
       {"daa_aldex2.tsv", "daa_linda.tsv", "daa_welch_t.tsv", "daa_wilcoxon.tsv", "consensus.tsv",
        "consensus_annotated.tsv", "errorbar.svg", "pca.svg", "heatmap.svg", "manifest.json"}) {
    CHECK(std::filesystem::exists(a.path() / name));
  }
  CHECK_FALSE(std::filesystem::exists(a.path() / ".staging"));
  CHECK_FALSE(std::filesystem::exists(a.path() / ".picrustkit.lock"));

  result = run_cli(common + b.path().string());
  REQUIRE(result.exit_code == 0);
  const auto manifest_a = nlohmann::json::parse(test_support::slurp(a.path() / "manifest.json"));
  const auto manifest_b = nlohmann::json::parse(test_support::slurp(b.path() / "manifest.json"));
  CHECK(manifest_a["artifacts"] == manifest_b["artifacts"]);
  CHECK(manifest_a["version"].get<std::string>() ==
        std::string(manifest_a["version"].get<std::string>()));
  // manifest checksums match independently recomputed hashes
  for (const auto& [name, checksum] : manifest_a["artifacts"].items()) {
    const auto recomputed = test_support::run_command("sha256sum " + (a.path() / name).string());
    CHECK(recomputed.output.substr(0, 64) == checksum.get<std::string>());
  }
}

TEST_CASE("config file drives run, flags override, bad alpha exits 2") {
  TempDir dir("cli-config");
  const auto config = test_support::write_file(dir.path() / "run.conf",
                                               "# demo configuration\n"
                                               "input = " + demo_table().string() + "\n" +
                                               "metadata = " + demo_metadata().string() + "\n" +
                                               "group_column = Group\n"
                                               "methods = welch_t, wilcoxon\n"
                                               "mc_instances = 8\n"
                                               "output_dir = " + (dir.path() / "out").string() + "\n");
  auto result = run_cli("run --config " + config.string());
  CHECK(result.exit_code == 0);
  CHECK(std::filesystem::exists(dir.path() / "out" / "daa_welch_t.tsv"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "out" / "daa_linda.tsv"));

  // flag overrides the file
  result = run_cli("run --config " + config.string() + " --methods linda --output-dir " +
                   (dir.path() / "out2").string());
  CHECK(result.exit_code == 0);
  CHECK(std::filesystem::exists(dir.path() / "out2" / "daa_linda.tsv"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "out2" / "daa_welch_t.tsv"));

  result = run_cli("run --config " + config.string() + " --alpha 1.5 --output-dir " +
                   (dir.path() / "out3").string());
  CHECK(result.exit_code == 2);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "out3" / "manifest.json"));

  // unknown config key is a hard error
  const auto bad = test_support::write_file(dir.path() / "bad.conf", "inptu = x\n");
  result = run_cli("run --config " + bad.string());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("inptu") != std::string::npos);
}

TEST_CASE("quiet mode silences info but not errors") {
  TempDir dir("cli-quiet");
  auto result = run_cli("--quiet convert -i " + demo_table().string() + " -o " +
                        (dir.path() / "k.tsv").string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("[info]") == std::string::npos);
  result = run_cli("--quiet convert -i /nonexistent -o " + (dir.path() / "x.tsv").string());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("[error]") != std::string::npos);
}

TEST_CASE("help is available for every subcommand") {
  for (const char* sub : {"convert", "daa", "annotate", "plot", "run"}) {
    const auto result = run_cli(std::string(sub) + " --help");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("Usage") != std::string::npos);
  }
}
