#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace meshcite::pipeline {

// Everything a run needs, assembled from the config file and CLI flags.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;  // MEDLINE files; empty means fetch
  std::string mesh;                           // filter descriptor; empty disables the filter
  std::optional<std::pair<int, int>> years;   // inclusive publication-year range
  std::optional<std::filesystem::path> crosswalk;
  std::vector<std::filesystem::path> wos_exports;
  std::optional<std::filesystem::path> similarity;  // default: all-distinct matrix
  std::string core;                                 // core category; empty skips the share
  std::filesystem::path out_dir;
  std::size_t max_len = 8000;
  std::size_t cap = 100000;
  bool offline = false;
  bool write_dbf = false;
  bool ut_space = false;  // emit "UT= (" instead of "UT=(" in wos.txt

  // fetch stage
  std::string query;
  int page_size = 200;
  std::string page_prefix = "p";

  // analyze stage shortcuts: run on a prebuilt per-record category file or a
  // distribution instead of merge artifacts
  std::optional<std::filesystem::path> categories;
  std::optional<std::filesystem::path> distribution;
};

// Checks the config for a stage (or the whole pipeline): referenced files
// must exist, the output directory must not coincide with an input directory,
// numeric ranges must be sane. Throws ConfigError with an actionable message.
void validate(const RunConfig& config, const std::string& stage);

struct StageResult {
  std::string stage;
  std::vector<std::filesystem::path> outputs;
};

// Stage runners. Each writes its artifacts plus <stage>.manifest.json into
// config.out_dir. File-name contract between stages:
//   parse   -> records.medline, parse_report.json
//   build   -> ti.csv, au.csv, mh.csv (+ .dbf trio when write_dbf)
//   query   -> wos.txt, citmatch.txt
//   merge   -> ti_merged.csv, categories.csv, merge_report.json
//   analyze -> distribution.csv, analytics.json
//   export  -> vosviewer_map.txt, vosviewer_network.txt, network.net,
//              rank_plot.svg, report.json, report.md
StageResult run_fetch(const RunConfig& config);
StageResult run_parse(const RunConfig& config);
StageResult run_build(const RunConfig& config);
StageResult run_query(const RunConfig& config);
StageResult run_merge(const RunConfig& config);
StageResult run_analyze(const RunConfig& config);
StageResult run_export(const RunConfig& config);

// Chains the stages; fetch is skipped when input files are given.
std::vector<StageResult> run_pipeline(const RunConfig& config);

// SHA-256 of a file's bytes, lowercase hex. Used for the manifest digests.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(std::string_view bytes);

inline constexpr int kManifestSchemaVersion = 1;

}  // namespace meshcite::pipeline
