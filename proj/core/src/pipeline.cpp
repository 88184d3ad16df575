#include "meshcite/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "meshcite/analytics.hpp"
#include "meshcite/crosswalk.hpp"
#include "meshcite/csv.hpp"
#include "meshcite/errors.hpp"
#include "meshcite/exporters.hpp"
#include "meshcite/fetcher.hpp"
#include "meshcite/medline.hpp"
#include "meshcite/tables.hpp"
#include "meshcite/wos.hpp"

namespace meshcite::pipeline {

namespace {

using nlohmann::json;

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoFailure("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoFailure("cannot write " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoFailure("short write to " + path.string());
  }
}

// Collects digests as the stage runs, then writes <stage>.manifest.json.
// Output paths are recorded relative to the output directory; inputs as
// given.
class Manifest {
 public:
  Manifest(std::string stage, std::filesystem::path out_dir)
      : stage_(std::move(stage)), out_dir_(std::move(out_dir)) {}

  void input(const std::filesystem::path& path) {
    inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
  }
  void output(const std::filesystem::path& path) {
    auto display = path.lexically_relative(out_dir_);
    outputs_.push_back({{"path", display.empty() ? path.string() : display.string()},
                        {"sha256", sha256_file(path)}});
  }
  void param(const std::string& key, const std::string& value) { parameters_[key] = value; }
  void param(const std::string& key, std::size_t value) { param(key, std::to_string(value)); }

  std::filesystem::path write() const {
    json j;
    j["schema_version"] = kManifestSchemaVersion;
    j["stage"] = stage_;
    j["parameters"] = parameters_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    auto path = out_dir_ / (stage_ + ".manifest.json");
    write_bytes(path, j.dump(2) + "\n");
    return path;
  }

 private:
  std::string stage_;
  std::filesystem::path out_dir_;
  std::map<std::string, std::string> parameters_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

void ensure_out_dir(const RunConfig& config) {
  if (config.out_dir.empty()) {
    throw ConfigError("no output directory given; pass --out <dir>");
  }
  std::filesystem::create_directories(config.out_dir);
}

void require_exists(const std::filesystem::path& path, const std::string& flag) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("file given by " + flag + " does not exist: " + path.string());
  }
}

std::filesystem::path artifact(const RunConfig& config, const char* name,
                               const char* produced_by) {
  auto path = config.out_dir / name;
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string(name) + " not found in " + config.out_dir.string() +
                      "; run the " + produced_by + " stage first");
  }
  return path;
}

std::string years_string(const std::optional<std::pair<int, int>>& years) {
  if (!years) {
    return "";
  }
  return std::to_string(years->first) + "-" + std::to_string(years->second);
}

// Per-record category file written by merge and consumed by analyze:
// pmid,wos_ut,categories with categories ';'-joined.
void write_categories_csv(const std::vector<wos::MatchedCategories>& matched,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoFailure("cannot write " + path.string());
  }
  csv::write_row(out, {"pmid", "wos_ut", "categories"});
  for (const auto& m : matched) {
    std::string joined;
    for (std::size_t i = 0; i < m.categories.size(); ++i) {
      if (i) {
        joined += "; ";
      }
      joined += m.categories[i];
    }
    csv::write_row(out, {m.pmid, m.wos_ut, joined});
  }
}

std::vector<wos::MatchedCategories> read_categories_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"pmid", "wos_ut", "categories"}) {
    throw SchemaMismatch("category file " + path.string() +
                         " must start with header pmid,wos_ut,categories");
  }
  std::vector<wos::MatchedCategories> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3) {
      throw SchemaMismatch(path.string() + ": row " + std::to_string(i) + " is not three columns");
    }
    wos::MatchedCategories m;
    m.pmid = rows[i][0];
    m.wos_ut = rows[i][1];
    std::string_view cell = rows[i][2];
    std::size_t start = 0;
    while (start <= cell.size() && !cell.empty()) {
      auto semi = cell.find(';', start);
      auto token = cell.substr(start, semi == std::string_view::npos ? semi : semi - start);
      while (!token.empty() && token.front() == ' ') {
        token.remove_prefix(1);
      }
      while (!token.empty() && token.back() == ' ') {
        token.remove_suffix(1);
      }
      if (!token.empty()) {
        m.categories.emplace_back(token);
      }
      if (semi == std::string_view::npos) {
        break;
      }
      start = semi + 1;
    }
    out.push_back(std::move(m));
  }
  return out;
}

json merge_report_json(const wos::MergeReport& report) {
  return {{"matched", report.matched},
          {"unmatched_ti", report.unmatched_ti},
          {"unmatched_export", report.unmatched_export},
          {"total_citations", report.total_citations},
          {"cited", report.cited},
          {"uncited", report.uncited}};
}

wos::MergeReport merge_report_from_json(const json& j) {
  wos::MergeReport report;
  report.matched = j.at("matched").get<std::size_t>();
  report.unmatched_ti = j.at("unmatched_ti").get<std::size_t>();
  report.unmatched_export = j.at("unmatched_export").get<std::size_t>();
  report.total_citations = j.at("total_citations").get<long>();
  report.cited = j.at("cited").get<std::size_t>();
  report.uncited = j.at("uncited").get<std::size_t>();
  return report;
}

std::map<std::string, std::string> run_config_echo(const RunConfig& config) {
  std::map<std::string, std::string> echo;
  echo["inputs"] = std::to_string(config.inputs.size()) + " file(s)";
  echo["mesh"] = config.mesh;
  echo["years"] = years_string(config.years);
  echo["crosswalk"] = config.crosswalk ? config.crosswalk->string() : "";
  std::string exports;
  for (const auto& e : config.wos_exports) {
    if (!exports.empty()) {
      exports += ", ";
    }
    exports += e.filename().string();
  }
  echo["wos_exports"] = exports;
  echo["similarity"] = config.similarity ? config.similarity->string() : "all-distinct (default)";
  echo["core"] = config.core;
  echo["max_len"] = std::to_string(config.max_len);
  echo["cap"] = std::to_string(config.cap);
  echo["offline"] = config.offline ? "true" : "false";
  return echo;
}

}  // namespace

std::string sha256_bytes(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_bytes(read_bytes(path)); }

void validate(const RunConfig& config, const std::string& stage) {
  if (config.out_dir.empty()) {
    throw ConfigError("no output directory given; pass --out <dir>");
  }

  std::vector<std::pair<std::filesystem::path, std::string>> referenced;
  for (const auto& input : config.inputs) {
    referenced.emplace_back(input, "--input");
  }
  if (config.crosswalk) {
    referenced.emplace_back(*config.crosswalk, "--crosswalk");
  }
  for (const auto& e : config.wos_exports) {
    referenced.emplace_back(e, "--wos-export");
  }
  if (config.similarity) {
    referenced.emplace_back(*config.similarity, "--similarity");
  }
  if (config.categories) {
    referenced.emplace_back(*config.categories, "--categories");
  }
  if (config.distribution) {
    referenced.emplace_back(*config.distribution, "--distribution");
  }

  auto out_dir = std::filesystem::weakly_canonical(config.out_dir);
  for (const auto& [path, flag] : referenced) {
    require_exists(path, flag);
    auto parent = std::filesystem::weakly_canonical(path).parent_path();
    if (parent == out_dir) {
      throw ConfigError("output directory " + config.out_dir.string() +
                        " coincides with the directory of " + flag + " " + path.string() +
                        "; choose a separate output directory");
    }
  }

  if (config.years && config.years->first > config.years->second) {
    throw ConfigError("year range is backwards: " + years_string(config.years));
  }
  if (config.max_len < 20) {
    throw ConfigError("--max-len must be at least 20 (one 15-character accession plus syntax)");
  }
  if (config.cap < 1) {
    throw ConfigError("--cap must be positive");
  }
  if (config.page_size < 1 || config.page_size > 10000) {
    throw ConfigError("--page-size must lie in [1, 10000]");
  }
  if (stage == "fetch" && !config.offline && config.query.empty()) {
    throw ConfigError("fetch requires --query (or --offline with previously saved pages)");
  }
  if ((stage == "pipeline" || stage == "parse") && config.inputs.empty() && config.query.empty() &&
      !config.offline) {
    throw ConfigError("no input: pass --input file(s), or --query for a fetch, or --offline");
  }
}

StageResult run_fetch(const RunConfig& config) {
  ensure_out_dir(config);
  auto prefix = config.out_dir / config.page_prefix;

  if (config.offline) {
    // Offline fetch is a no-op re-using previously saved pages.
    auto pages = fetcher::list_saved_pages(prefix);
    if (pages.empty()) {
      throw ConfigError("offline fetch: no saved pages matching " + prefix.string() + "N.txt");
    }
    Manifest manifest("fetch", config.out_dir);
    manifest.param("mode", "offline");
    manifest.param("pages", pages.size());
    StageResult result{"fetch", pages};
    for (const auto& p : pages) {
      manifest.output(p);
    }
    manifest.write();
    return result;
  }

  auto transport = fetcher::make_https_transport("eutils.ncbi.nlm.nih.gov");
  auto clock = fetcher::make_steady_clock();
  fetcher::EutilsClient::Options options;
  if (const char* key = std::getenv("NCBI_API_KEY"); key != nullptr && *key != '\0') {
    options.api_key = key;
  }
  options.rate_per_second = fetcher::default_rate_per_second(!options.api_key.empty());
  fetcher::EutilsClient client(*transport, *clock, options);

  fetcher::FetchJob job;
  job.query = config.query;
  job.date_range = config.years;
  job.page_size = config.page_size;
  job.output_prefix = prefix;

  auto search = client.search_ids(job);
  std::cerr << "fetch: query matched " << search.total << " records\n";
  auto outcome = client.fetch_medline(search.pmids, prefix, config.page_size, job.start_index);

  Manifest manifest("fetch", config.out_dir);
  manifest.param("query", config.query);
  manifest.param("years", years_string(config.years));
  manifest.param("page_size", static_cast<std::size_t>(config.page_size));
  manifest.param("total", static_cast<std::size_t>(search.total));
  StageResult result{"fetch", outcome.files};
  for (const auto& p : outcome.files) {
    manifest.output(p);
  }
  manifest.write();
  return result;
}

StageResult run_parse(const RunConfig& config) {
  ensure_out_dir(config);
  std::vector<std::filesystem::path> inputs = config.inputs;
  if (inputs.empty()) {
    inputs = fetcher::list_saved_pages(config.out_dir / config.page_prefix);
    if (inputs.empty()) {
      throw ConfigError("parse: no --input files and no saved pages in " +
                        config.out_dir.string());
    }
  }

  Manifest manifest("parse", config.out_dir);
  std::vector<medline::MedlineRecord> records;
  std::size_t blocks_seen = 0, replaced_bytes = 0;
  json issues = json::array();
  for (const auto& path : inputs) {
    manifest.input(path);
    auto result = medline::parse_medline_file(path);
    for (const auto& issue : result.report.issues) {
      issues.push_back({{"file", path.string()},
                        {"kind", issue.kind == medline::ParseIssue::Kind::missing_pmid
                                     ? "missing_pmid"
                                     : "invalid_ut"},
                        {"record_index", issue.record_index},
                        {"detail", issue.detail}});
    }
    blocks_seen += result.report.blocks_seen;
    replaced_bytes += result.report.replaced_bytes;
    std::move(result.records.begin(), result.records.end(), std::back_inserter(records));
  }

  std::size_t before_filter = records.size();
  if (!config.mesh.empty()) {
    records = medline::filter_by_mesh(records, config.mesh, config.years);
  }

  auto records_path = config.out_dir / "records.medline";
  write_bytes(records_path, medline::serialize_records(records));

  json report;
  report["schema_version"] = 1;
  report["files"] = inputs.size();
  report["blocks_seen"] = blocks_seen;
  report["records_parsed"] = before_filter;
  report["records_after_filter"] = records.size();
  report["replaced_bytes"] = replaced_bytes;
  report["issues"] = issues;
  auto report_path = config.out_dir / "parse_report.json";
  write_bytes(report_path, report.dump(2) + "\n");

  manifest.param("mesh", config.mesh);
  manifest.param("years", years_string(config.years));
  manifest.output(records_path);
  manifest.output(report_path);
  manifest.write();
  return {"parse", {records_path, report_path}};
}

StageResult run_build(const RunConfig& config) {
  ensure_out_dir(config);
  auto records_path = artifact(config, "records.medline", "parse");

  Manifest manifest("build", config.out_dir);
  manifest.input(records_path);

  auto parsed = medline::parse_medline_file(records_path);
  auto tables = tables::build_tables(parsed.records);

  if (config.crosswalk) {
    require_exists(*config.crosswalk, "--crosswalk");
    manifest.input(*config.crosswalk);
    auto map = crosswalk::IdentifierMap::load_csv(*config.crosswalk);
    auto fill = crosswalk::apply_crosswalk(tables, map);
    manifest.param("crosswalk_already_present", fill.already_present);
    manifest.param("crosswalk_filled", fill.filled);
    manifest.param("crosswalk_still_missing", fill.still_missing);
    manifest.param("crosswalk_conflicts", fill.conflicts);
  }

  auto paths = tables::write_tables(tables, tables::TableFormat::csv, config.out_dir);
  StageResult result{"build", {paths.ti, paths.au, paths.mh}};
  manifest.output(paths.ti);
  manifest.output(paths.au);
  manifest.output(paths.mh);
  if (config.write_dbf) {
    auto dbf = tables::write_tables(tables, tables::TableFormat::dbf, config.out_dir);
    result.outputs.insert(result.outputs.end(), {dbf.ti, dbf.au, dbf.mh});
    manifest.output(dbf.ti);
    manifest.output(dbf.au);
    manifest.output(dbf.mh);
  }
  manifest.param("records", tables.ti.size());
  manifest.write();
  return result;
}

StageResult run_query(const RunConfig& config) {
  ensure_out_dir(config);
  auto ti_path = artifact(config, "ti.csv", "build");

  Manifest manifest("query", config.out_dir);
  manifest.input(ti_path);

  auto ti = tables::read_ti_csv(ti_path);
  std::vector<std::string> uts;
  for (const auto& row : ti) {
    if (row.wos_ut) {
      uts.push_back(*row.wos_ut);
    }
  }
  crosswalk::enforce_system_cap(uts, config.cap);

  std::string wos_txt;
  std::size_t n_queries = 0, duplicates = 0;
  if (!uts.empty()) {
    crosswalk::QueryOptions options;
    options.max_len = config.max_len;
    options.space_after_ut = config.ut_space;
    auto generated = crosswalk::generate_ut_queries(uts, options);
    duplicates = generated.duplicates_dropped;
    if (duplicates > 0) {
      std::cerr << "query: dropped " << duplicates << " duplicate accession(s)\n";
    }
    n_queries = generated.batch.queries.size();
    for (const auto& q : generated.batch.queries) {
      wos_txt += q;
      wos_txt += "\n";
    }
  } else {
    std::cerr << "query: no accessions present; wos.txt will be empty\n";
  }
  auto wos_path = config.out_dir / "wos.txt";
  write_bytes(wos_path, wos_txt);

  // Citation-matcher lines for the whole table (the reverse road back into
  // PubMed).
  tables::TableSet full;
  full.ti = ti;
  auto au_path = config.out_dir / "au.csv";
  if (std::filesystem::exists(au_path)) {
    full = tables::read_tables(config.out_dir);
  }
  auto citmatch = crosswalk::format_citmatch(full);
  std::string citmatch_txt;
  for (const auto& line : citmatch.lines) {
    citmatch_txt += line;
    citmatch_txt += "\n";
  }
  auto citmatch_path = config.out_dir / "citmatch.txt";
  write_bytes(citmatch_path, citmatch_txt);

  manifest.param("max_len", config.max_len);
  manifest.param("cap", config.cap);
  manifest.param("accessions", uts.size());
  manifest.param("duplicates_dropped", duplicates);
  manifest.param("queries", n_queries);
  manifest.param("citmatch_rows", citmatch.lines.size());
  manifest.param("citmatch_skipped", citmatch.issues.size());
  manifest.output(wos_path);
  manifest.output(citmatch_path);
  manifest.write();
  return {"query", {wos_path, citmatch_path}};
}

StageResult run_merge(const RunConfig& config) {
  ensure_out_dir(config);
  auto ti_path = artifact(config, "ti.csv", "build");

  Manifest manifest("merge", config.out_dir);
  manifest.input(ti_path);

  tables::TableSet tables;
  tables.ti = tables::read_ti_csv(ti_path);

  std::vector<wos::WosExportRecord> export_records;
  std::size_t export_issues = 0;
  for (const auto& path : config.wos_exports) {
    require_exists(path, "--wos-export");
    manifest.input(path);
    auto parsed = wos::parse_wos_export_file(path);
    export_issues += parsed.issues.size();
    std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(export_records));
  }

  auto outcome = wos::merge_citations(tables, export_records);
  if (outcome.duplicate_uts > 0) {
    std::cerr << "merge: " << outcome.duplicate_uts
              << " duplicate export accession(s) collapsed to max TC\n";
  }

  auto merged_path = config.out_dir / "ti_merged.csv";
  tables::write_ti_csv(tables.ti, merged_path);
  auto categories_path = config.out_dir / "categories.csv";
  write_categories_csv(outcome.matched_categories, categories_path);
  auto report_path = config.out_dir / "merge_report.json";
  write_bytes(report_path, merge_report_json(outcome.report).dump(2) + "\n");

  manifest.param("exports", config.wos_exports.size());
  manifest.param("export_rows", export_records.size());
  manifest.param("export_issues", export_issues);
  manifest.param("duplicate_uts", outcome.duplicate_uts);
  manifest.output(merged_path);
  manifest.output(categories_path);
  manifest.output(report_path);
  manifest.write();
  return {"merge", {merged_path, categories_path, report_path}};
}

StageResult run_analyze(const RunConfig& config) {
  ensure_out_dir(config);
  Manifest manifest("analyze", config.out_dir);

  analytics::CategoryDistribution dist;
  std::string source;
  if (config.distribution) {
    require_exists(*config.distribution, "--distribution");
    manifest.input(*config.distribution);
    dist = analytics::read_distribution_csv(*config.distribution);
    source = "distribution file";
  } else {
    std::filesystem::path categories_path;
    if (config.categories) {
      require_exists(*config.categories, "--categories");
      categories_path = *config.categories;
    } else {
      categories_path = artifact(config, "categories.csv", "merge");
    }
    manifest.input(categories_path);
    auto matched = read_categories_csv(categories_path);
    std::vector<std::vector<std::string>> per_record;
    per_record.reserve(matched.size());
    for (auto& m : matched) {
      per_record.push_back(std::move(m.categories));
    }
    dist = analytics::wc_distribution(per_record);
    source = "per-record categories";
  }

  analytics::SimilarityMatrix sim;
  std::string sim_source;
  if (config.similarity) {
    require_exists(*config.similarity, "--similarity");
    manifest.input(*config.similarity);
    sim = analytics::SimilarityMatrix::load_csv(*config.similarity);
    sim_source = config.similarity->string();
  } else {
    std::vector<std::string> labels;
    for (const auto& [category, count] : dist.counts) {
      labels.push_back(category);
    }
    sim = analytics::SimilarityMatrix::all_distinct(std::move(labels));
    sim_source = "all-distinct (default)";
  }

  std::optional<double> diversity;
  if (dist.total_attributions > 0) {
    diversity = analytics::rao_stirling(dist, sim);
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4f", *diversity);
    std::cout << "Rao-Stirling diversity: " << buffer << " (similarity: " << sim_source << ")\n";
  } else {
    std::cerr << "analyze: empty distribution; diversity not computed\n";
  }

  std::optional<double> share;
  if (!config.core.empty()) {
    if (dist.n_documents > 0) {
      share = analytics::core_share(dist, config.core);
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.4f", *share);
      std::cout << "Core category share: " << buffer << " (" << config.core << ")\n";
    } else {
      std::cerr << "analyze: document count unknown for this input; core share not computed\n";
    }
  }

  // Rank series from the merged table when one exists.
  std::optional<analytics::RankSeries> ranking;
  auto merged_path = config.out_dir / "ti_merged.csv";
  if (!config.distribution && !config.categories && std::filesystem::exists(merged_path)) {
    manifest.input(merged_path);
    auto ti = tables::read_ti_csv(merged_path);
    std::vector<std::optional<long>> tc;
    tc.reserve(ti.size());
    for (const auto& row : ti) {
      tc.push_back(row.times_cited);
    }
    ranking = analytics::citation_rank_series(tc);
  }

  auto dist_path = config.out_dir / "distribution.csv";
  analytics::write_distribution_csv(dist, dist_path);

  json analytics_json;
  analytics_json["schema_version"] = 1;
  analytics_json["source"] = source;
  analytics_json["n_documents"] = dist.n_documents;
  analytics_json["total_attributions"] = dist.total_attributions;
  analytics_json["n_categories"] = dist.counts.size();
  analytics_json["rao_stirling"] = diversity ? json(*diversity) : json();
  analytics_json["similarity_source"] = sim_source;
  json core;
  core["category"] = config.core;
  if (share) {
    auto it = dist.counts.find(config.core);
    core["count"] = it != dist.counts.end() ? it->second : 0;
    core["share"] = *share;
  } else {
    core["count"] = nullptr;
    core["share"] = nullptr;
  }
  analytics_json["core"] = core;
  if (ranking) {
    analytics_json["ranking"] = {{"n", ranking->values.size()},
                                 {"total", ranking->total},
                                 {"zeros", ranking->zeros}};
  } else {
    analytics_json["ranking"] = nullptr;
  }
  auto analytics_path = config.out_dir / "analytics.json";
  write_bytes(analytics_path, analytics_json.dump(2) + "\n");

  manifest.param("core", config.core);
  manifest.param("similarity", sim_source);
  manifest.output(dist_path);
  manifest.output(analytics_path);
  manifest.write();
  return {"analyze", {dist_path, analytics_path}};
}

StageResult run_export(const RunConfig& config) {
  ensure_out_dir(config);
  Manifest manifest("export", config.out_dir);

  auto dist_path = artifact(config, "distribution.csv", "analyze");
  manifest.input(dist_path);
  auto dist = analytics::read_distribution_csv(dist_path);

  exporters::ReportInputs report;
  report.run_config = run_config_echo(config);

  auto analytics_path = config.out_dir / "analytics.json";
  if (std::filesystem::exists(analytics_path)) {
    manifest.input(analytics_path);
    json a = json::parse(read_bytes(analytics_path));
    dist.n_documents = a.value("n_documents", 0);
    if (a.contains("rao_stirling") && !a["rao_stirling"].is_null()) {
      report.diversity = a["rao_stirling"].get<double>();
    }
    report.similarity_source = a.value("similarity_source", "all-distinct (default)");
    if (a.contains("core") && !a["core"]["share"].is_null()) {
      report.core_category = a["core"]["category"].get<std::string>();
      report.core_share = a["core"]["share"].get<double>();
    }
  }

  auto merge_report_path = config.out_dir / "merge_report.json";
  if (std::filesystem::exists(merge_report_path)) {
    manifest.input(merge_report_path);
    report.merge = merge_report_from_json(json::parse(read_bytes(merge_report_path)));
  }

  auto merged_path = config.out_dir / "ti_merged.csv";
  if (std::filesystem::exists(merged_path)) {
    manifest.input(merged_path);
    auto ti = tables::read_ti_csv(merged_path);
    std::vector<std::optional<long>> tc;
    tc.reserve(ti.size());
    for (const auto& row : ti) {
      tc.push_back(row.times_cited);
    }
    auto series = analytics::citation_rank_series(tc);
    if (!series.values.empty()) {
      report.ranking = std::move(series);
    }
  }

  std::optional<analytics::SimilarityMatrix> sim;
  if (config.similarity) {
    require_exists(*config.similarity, "--similarity");
    manifest.input(*config.similarity);
    sim = analytics::SimilarityMatrix::load_csv(*config.similarity);
  } else if (!dist.counts.empty()) {
    std::vector<std::string> labels;
    for (const auto& [category, count] : dist.counts) {
      labels.push_back(category);
    }
    sim = analytics::SimilarityMatrix::all_distinct(std::move(labels));
  }

  StageResult result{"export", {}};

  if (!dist.counts.empty()) {
    auto vos = exporters::export_vosviewer(dist, sim ? &*sim : nullptr, config.out_dir);
    result.outputs.push_back(vos.map_file);
    manifest.output(vos.map_file);
    if (vos.network_file) {
      result.outputs.push_back(*vos.network_file);
      manifest.output(*vos.network_file);
    }
    auto pajek_path = config.out_dir / "network.net";
    exporters::export_pajek(dist, *sim, pajek_path);
    result.outputs.push_back(pajek_path);
    manifest.output(pajek_path);
  } else {
    std::cerr << "export: empty distribution; map and network files skipped\n";
  }

  if (report.ranking) {
    auto svg_path = config.out_dir / "rank_plot.svg";
    exporters::render_rank_plot(*report.ranking, svg_path);
    result.outputs.push_back(svg_path);
    manifest.output(svg_path);
  } else {
    std::cerr << "export: no citation series; rank plot skipped\n";
  }

  report.distribution = dist;
  auto json_path = config.out_dir / "report.json";
  auto md_path = config.out_dir / "report.md";
  exporters::write_report(report, json_path, md_path);
  result.outputs.push_back(json_path);
  result.outputs.push_back(md_path);
  manifest.output(json_path);
  manifest.output(md_path);
  manifest.write();
  return result;
}

std::vector<StageResult> run_pipeline(const RunConfig& config) {
  std::vector<StageResult> results;
  // The fetch step is optional: given input files, the pipeline starts from
  // them directly.
  if (config.inputs.empty() && !config.offline) {
    results.push_back(run_fetch(config));
  }
  results.push_back(run_parse(config));
  results.push_back(run_build(config));
  results.push_back(run_query(config));
  results.push_back(run_merge(config));
  results.push_back(run_analyze(config));
  results.push_back(run_export(config));
  return results;
}

}  // namespace meshcite::pipeline
