// meshcite: batch citation analysis over MeSH-selected document sets.
//
// Subcommands mirror the pipeline stages; `pipeline` chains them all,
// skipping the network fetch when input files are given.

#include <charconv>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshcite/errors.hpp"
#include "meshcite/pipeline.hpp"

namespace {

using meshcite::pipeline::RunConfig;
using meshcite::pipeline::StageResult;

std::optional<std::pair<int, int>> parse_years(const std::string& text) {
  if (text.empty()) {
    return std::nullopt;
  }
  auto sep = text.find_first_of("-:");
  auto to_int = [&](std::string_view part) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw meshcite::ConfigError("bad --years value \"" + text + "\"; expected FROM-TO");
    }
    return value;
  };
  if (sep == std::string::npos) {
    int year = to_int(text);
    return std::make_pair(year, year);
  }
  return std::make_pair(to_int(std::string_view(text).substr(0, sep)),
                        to_int(std::string_view(text).substr(sep + 1)));
}

using StageFn = StageResult (*)(const RunConfig&);

const std::vector<std::pair<std::string, StageFn>> kStages = {
    {"fetch", meshcite::pipeline::run_fetch},     {"parse", meshcite::pipeline::run_parse},
    {"build", meshcite::pipeline::run_build},     {"query", meshcite::pipeline::run_query},
    {"merge", meshcite::pipeline::run_merge},     {"analyze", meshcite::pipeline::run_analyze},
    {"export", meshcite::pipeline::run_export},
};

int run_stage(const std::string& stage, const RunConfig& config) {
  try {
    meshcite::pipeline::validate(config, stage);
  } catch (const meshcite::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  }

  std::string current = stage;
  try {
    std::vector<StageResult> results;
    for (const auto& [name, fn] : kStages) {
      if (stage != "pipeline" && stage != name) {
        continue;
      }
      if (stage == "pipeline" && name == "fetch" && (!config.inputs.empty() || config.offline)) {
        continue;  // the fetch step is optional once inputs exist
      }
      current = name;
      results.push_back(fn(config));
    }
    for (const auto& result : results) {
      std::cerr << "stage " << result.stage << ": " << result.outputs.size()
                << " artifact(s) written\n";
    }
    return 0;
  } catch (const meshcite::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "stage " << current << " failed: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation analysis over MeSH-selected MEDLINE document sets"};
  app.fallthrough();
  app.set_config("--config", "", "key=value run configuration file; flags override file keys");

  std::vector<std::string> inputs;
  std::string mesh, years, core, query, prefix = "p";
  std::string crosswalk, similarity, out_dir, categories, distribution;
  std::vector<std::string> wos_exports;
  std::size_t max_len = 8000;
  std::size_t cap = 100000;
  int page_size = 200;
  bool offline = false, dbf = false, ut_space = false;

  app.add_option("--input", inputs, "MEDLINE flat-format input file(s)");
  app.add_option("--mesh", mesh, "MeSH descriptor to filter on (case-insensitive)");
  app.add_option("--years", years, "publication year range, e.g. 2010-2011");
  app.add_option("--crosswalk", crosswalk, "pmid,wos_ut CSV filling missing accessions");
  app.add_option("--wos-export", wos_exports, "WoS tab-delimited export file(s)");
  app.add_option("--similarity", similarity, "similarity matrix CSV (default: all-distinct)");
  app.add_option("--core", core, "core category for the share computation");
  app.add_option("--out", out_dir, "output directory for artifacts and manifests");
  app.add_option("--max-len", max_len, "maximum accession query length");
  app.add_option("--cap", cap, "retrieval system set-size cap");
  app.add_flag("--offline", offline, "never touch the network; reuse saved pages");
  app.add_flag("--dbf", dbf, "also write dBase III ti/au/mh files");
  app.add_flag("--ut-space", ut_space, "emit 'UT= (' instead of 'UT=(' in wos.txt");
  app.add_option("--query", query, "search expression for the fetch stage");
  app.add_option("--page-size", page_size, "records per saved page")->check(CLI::Range(1, 10000));
  app.add_option("--prefix", prefix, "saved page filename prefix");
  app.add_option("--categories", categories, "per-record category CSV for analyze");
  app.add_option("--distribution", distribution, "category,count,proportion CSV for analyze");

  std::vector<std::string> stage_names = {"fetch",  "parse",   "build",  "query",
                                          "merge",  "analyze", "export", "pipeline"};
  for (const auto& name : stage_names) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
  }
  app.require_subcommand(0, 1);

  CLI11_PARSE(app, argc, argv);

  auto chosen = app.get_subcommands();
  if (chosen.empty()) {
    std::cerr << app.help() << "\n";
    return 1;
  }

  RunConfig config;
  for (const auto& path : inputs) {
    config.inputs.emplace_back(path);
  }
  config.mesh = mesh;
  try {
    config.years = parse_years(years);
  } catch (const meshcite::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  }
  if (!crosswalk.empty()) {
    config.crosswalk = crosswalk;
  }
  for (const auto& path : wos_exports) {
    config.wos_exports.emplace_back(path);
  }
  if (!similarity.empty()) {
    config.similarity = similarity;
  }
  config.core = core;
  config.out_dir = out_dir;
  config.max_len = max_len;
  config.cap = cap;
  config.offline = offline;
  config.write_dbf = dbf;
  config.ut_space = ut_space;
  config.query = query;
  config.page_size = page_size;
  config.page_prefix = prefix;
  if (!categories.empty()) {
    config.categories = categories;
  }
  if (!distribution.empty()) {
    config.distribution = distribution;
  }

  return run_stage(chosen.front()->get_name(), config);
}
