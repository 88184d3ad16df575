#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include <json.hpp>

#include "meshcite/errors.hpp"
#include "meshcite/pipeline.hpp"
#include "support/test_support.hpp"

using namespace meshcite;
using namespace meshcite::pipeline;
using testsupport::TempDir;

namespace {

RunConfig brugada_config(const std::filesystem::path& out) {
  RunConfig config;
  config.inputs = {testsupport::data_dir() / "brugada" / "medline.txt"};
  config.mesh = "Brugada Syndrome";
  config.years = {{2010, 2011}};
  config.wos_exports = {testsupport::data_dir() / "brugada" / "wos_june2012.txt"};
  config.core = "Cardiac Cardiovascular Systems";
  config.out_dir = out;
  config.offline = true;
  return config;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CommandResult run_tool(const std::string& args, const std::filesystem::path& scratch) {
  auto out_path = scratch / "cmd_stdout.txt";
  auto err_path = scratch / "cmd_stderr.txt";
  std::string command = std::string(MESHCITE_TOOL) + " " + args + " >" + out_path.string() +
                        " 2>" + err_path.string();
  int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = testsupport::read_file(out_path);
  result.err = testsupport::read_file(err_path);
  return result;
}

}  // namespace

TEST_CASE("sha256 matches the published test vector") {
  CHECK(sha256_bytes("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_bytes("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("validation rejects broken configurations with actionable messages") {
  TempDir out;
  SUBCASE("missing input file") {
    RunConfig config;
    config.inputs = {"/nonexistent/input.txt"};
    config.out_dir = out.path();
    CHECK_THROWS_AS(validate(config, "parse"), ConfigError);
  }
  SUBCASE("output directory colliding with an input directory") {
    auto config = brugada_config(testsupport::data_dir() / "brugada");
    CHECK_THROWS_AS(validate(config, "parse"), ConfigError);
  }
  SUBCASE("backwards year range") {
    auto config = brugada_config(out.path());
    config.years = {{2011, 2010}};
    CHECK_THROWS_AS(validate(config, "parse"), ConfigError);
  }
  SUBCASE("query budget below one accession") {
    auto config = brugada_config(out.path());
    config.max_len = 19;
    CHECK_THROWS_AS(validate(config, "query"), ConfigError);
  }
  SUBCASE("no input at all") {
    RunConfig config;
    config.out_dir = out.path();
    CHECK_THROWS_AS(validate(config, "pipeline"), ConfigError);
  }
  SUBCASE("the fixture configuration passes") {
    auto config = brugada_config(out.path());
    CHECK_NOTHROW(validate(config, "pipeline"));
  }
}

TEST_CASE("the offline pipeline reproduces the fixture aggregates end to end") {
  TempDir out;
  auto config = brugada_config(out.path());
  auto results = run_pipeline(config);
  REQUIRE(results.size() == 6);  // fetch skipped: inputs given

  // artifacts exist
  for (const char* name :
       {"records.medline", "parse_report.json", "ti.csv", "au.csv", "mh.csv", "wos.txt",
        "citmatch.txt", "ti_merged.csv", "categories.csv", "merge_report.json",
        "distribution.csv", "analytics.json", "vosviewer_map.txt", "vosviewer_network.txt",
        "network.net", "rank_plot.svg", "report.json", "report.md"}) {
    CHECK_MESSAGE(std::filesystem::exists(out / name), name);
  }

  // single concatenated accession query, as the fixture set fits one line
  auto wos_txt = testsupport::read_file(out / "wos.txt");
  CHECK(std::count(wos_txt.begin(), wos_txt.end(), '\n') == 1);
  CHECK(wos_txt.starts_with("UT=("));

  auto merge = nlohmann::json::parse(testsupport::read_file(out / "merge_report.json"));
  CHECK(merge["matched"] == 235);
  CHECK(merge["total_citations"] == 608);
  CHECK(merge["cited"] == 126);
  CHECK(merge["uncited"] == 109);

  auto analytics = nlohmann::json::parse(testsupport::read_file(out / "analytics.json"));
  CHECK(analytics["n_documents"] == 235);
  CHECK(analytics["total_attributions"] == 292);
  CHECK(analytics["n_categories"] == 24);
  CHECK(analytics["core"]["count"] == 186);

  auto svg = testsupport::read_file(out / "rank_plot.svg");
  CHECK(svg.find("608") != std::string::npos);
  CHECK(svg.find("109") != std::string::npos);
}

TEST_CASE("stage manifests chain by digest") {
  TempDir out;
  auto config = brugada_config(out.path());
  run_pipeline(config);

  std::map<std::string, std::string> produced;  // path -> digest
  for (const char* stage : {"parse", "build", "query", "merge", "analyze", "export"}) {
    auto manifest = nlohmann::json::parse(
        testsupport::read_file(out / (std::string(stage) + ".manifest.json")));
    CHECK(manifest["stage"] == stage);
    for (const auto& input : manifest["inputs"]) {
      std::string path = input["path"];
      auto name = std::filesystem::path(path).filename().string();
      if (produced.contains(name)) {
        CHECK_MESSAGE(produced[name] == input["sha256"], stage << " input " << name);
      }
    }
    for (const auto& output : manifest["outputs"]) {
      produced[std::filesystem::path(std::string(output["path"])).filename().string()] =
          output["sha256"];
    }
  }
  // recorded digests match the files on disk
  for (const auto& [name, digest] : produced) {
    CHECK(sha256_file(out / name) == digest);
  }
}

TEST_CASE("rerunning the pipeline rewrites byte-identical artifacts") {
  TempDir out;
  auto config = brugada_config(out.path());
  run_pipeline(config);
  std::map<std::string, std::string> first;
  for (const auto& entry : std::filesystem::directory_iterator(out.path())) {
    first[entry.path().filename().string()] = testsupport::read_file(entry.path());
  }
  run_pipeline(config);
  for (const auto& [name, bytes] : first) {
    CHECK_MESSAGE(testsupport::read_file(out / name) == bytes, name);
  }
}

TEST_CASE("crosswalk wiring fills accessions during build") {
  TempDir out;
  auto config = brugada_config(out.path());
  config.crosswalk = testsupport::data_dir() / "brugada" / "crosswalk.csv";
  run_parse(config);
  run_build(config);
  auto manifest = nlohmann::json::parse(testsupport::read_file(out / "build.manifest.json"));
  CHECK(manifest["parameters"]["crosswalk_already_present"] == "235");
  CHECK(manifest["parameters"]["crosswalk_filled"] == "10");
  CHECK(manifest["parameters"]["crosswalk_still_missing"] == "41");
}

TEST_CASE("analyze runs standalone on a distribution file") {
  TempDir out;
  TempDir in;
  testsupport::write_file(in / "dist.csv",
                          "category,count,proportion\nA,1,0.5\nB,1,0.5\n");
  RunConfig config;
  config.out_dir = out.path();
  config.distribution = in / "dist.csv";
  run_analyze(config);
  auto analytics = nlohmann::json::parse(testsupport::read_file(out / "analytics.json"));
  // all-distinct default over two equal categories
  CHECK(analytics["rao_stirling"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("the cli maps outcomes to exit codes") {
  TempDir scratch;
  TempDir out;
  auto data = testsupport::data_dir();

  SUBCASE("a full offline pipeline run succeeds") {
    auto result = run_tool("pipeline --offline --input " + (data / "brugada/medline.txt").string() +
                               " --mesh \"Brugada Syndrome\" --years 2010-2011 --wos-export " +
                               (data / "brugada/wos_june2012.txt").string() +
                               " --core \"Cardiac Cardiovascular Systems\" --out " +
                               (out / "run").string(),
                           scratch.path());
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("Rao-Stirling diversity: 0.") != std::string::npos);
    CHECK(result.err.find("stage export") != std::string::npos);
  }
  SUBCASE("validation failures exit 1") {
    auto result = run_tool("pipeline --input /nonexistent.txt --out " + (out / "v").string(),
                           scratch.path());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("invalid configuration") != std::string::npos);
  }
  SUBCASE("a stage failure names the stage on stderr and exits 2") {
    testsupport::write_file(scratch / "bad_export.txt", "UT\tTC\tWC\n000000000000001\tnope\tA\n");
    // parse+build first so merge has its tables
    run_tool("parse --input " + (data / "brugada/medline.txt").string() + " --out " +
                 (out / "m").string(),
             scratch.path());
    run_tool("build --out " + (out / "m").string(), scratch.path());
    auto result = run_tool("merge --wos-export " + (scratch / "bad_export.txt").string() +
                               " --out " + (out / "m").string(),
                           scratch.path());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("stage merge failed") != std::string::npos);
  }
  SUBCASE("missing subcommand prints help and exits 1") {
    auto result = run_tool("--out somewhere", scratch.path());
    CHECK(result.exit_code == 1);
  }
  SUBCASE("a config file drives the run and flags override it") {
    std::string cfg = "input = \"" + (data / "brugada/medline.txt").string() +
                      "\"\nmesh = \"Brugada Syndrome\"\nyears = \"2010-2011\"\n" +
                      "wos-export = \"" + (data / "brugada/wos_june2012.txt").string() +
                      "\"\ncore = \"Cardiac Cardiovascular Systems\"\noffline = true\nout = \"" +
                      (out / "cfg_default").string() + "\"\n";
    testsupport::write_file(scratch / "run.cfg", cfg);
    auto result = run_tool("pipeline --config " + (scratch / "run.cfg").string() + " --out " +
                               (out / "cfg_override").string(),
                           scratch.path());
    CHECK(result.exit_code == 0);
    CHECK(std::filesystem::exists(out / "cfg_override" / "report.json"));
    CHECK_FALSE(std::filesystem::exists(out / "cfg_default"));
  }
}
