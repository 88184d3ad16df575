#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshcite/analytics.hpp"
#include "meshcite/wos.hpp"

namespace meshcite::exporters {

// Optional per-category layout passed through from an external mapping tool;
// this library never computes coordinates itself.
struct NodeLayout {
  double x = 0.0;
  double y = 0.0;
  std::optional<int> cluster;
};

using LayoutMap = std::map<std::string, NodeLayout>;

struct VosPaths {
  std::filesystem::path map_file;
  std::optional<std::filesystem::path> network_file;
};

// Writes the tab-separated map file ("id label weight", plus "x y cluster"
// when a layout is given) and, when a similarity matrix is supplied, the
// network file of "id1 id2 weight" rows for i < j with weight > 0. Node ids
// are assigned in presentation order (descending weight, then label).
VosPaths export_vosviewer(const analytics::CategoryDistribution& dist,
                          const analytics::SimilarityMatrix* sim,
                          const std::filesystem::path& directory,
                          const LayoutMap* layout = nullptr);

// Pajek network: "*Vertices n" with quoted labels, then "*Edges" with
// "i j w" rows for i < j, w > 0, 1-based ids in the same order as the map.
std::filesystem::path export_pajek(const analytics::CategoryDistribution& dist,
                                   const analytics::SimilarityMatrix& sim,
                                   const std::filesystem::path& path);

// Self-contained SVG of the citation ranking: x = rank, y = citations, with
// an annotation carrying the total and uncited counts. Throws EmptySeries.
void render_rank_plot(const analytics::RankSeries& series, const std::filesystem::path& path);

// Everything the run produced that belongs in the report. Absent pieces are
// rendered as explicit empty/zero sections.
struct ReportInputs {
  std::optional<wos::MergeReport> merge;
  std::optional<analytics::CategoryDistribution> distribution;
  std::optional<double> diversity;
  std::string similarity_source;  // e.g. a file path or "all-distinct (default)"
  std::optional<std::string> core_category;
  std::optional<double> core_share;
  std::optional<analytics::RankSeries> ranking;
  std::map<std::string, std::string> run_config;
};

// JSON mirror of the results plus a Markdown rendering whose category table
// is ordered by descending count. The JSON schema carries schema_version.
void write_report(const ReportInputs& inputs, const std::filesystem::path& json_path,
                  const std::filesystem::path& md_path);

// Reads back a report written by write_report (round-trip counterpart;
// ranking values are restored from the JSON series).
ReportInputs read_report_json(const std::filesystem::path& json_path);

}  // namespace meshcite::exporters
