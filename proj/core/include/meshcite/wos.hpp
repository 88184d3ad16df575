#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshcite/tables.hpp"

namespace meshcite::wos {

// One row of a WoS tab-delimited export, reduced to the fields this pipeline
// consumes: accession, times cited, category list, and the PM column when the
// export carries one (diagnostics only; never a join key).
struct WosExportRecord {
  std::string wos_ut;
  long times_cited = 0;
  std::vector<std::string> categories;
  std::optional<std::string> pubmed_id;

  friend bool operator==(const WosExportRecord&, const WosExportRecord&) = default;
};

struct ExportIssue {
  std::size_t row = 0;  // 1-based data row number
  std::string message;
};

struct ExportParseResult {
  std::vector<WosExportRecord> records;
  std::vector<ExportIssue> issues;  // e.g. rows without any category
};

// Parses a tab-delimited export whose header row names at least UT, TC and
// WC. WC cells are split on ';' and trimmed; an empty TC cell reads as 0.
// Input may be UTF-8 (with or without BOM) or UTF-16 with BOM. Throws
// MissingColumn or BadTcValue (with the row number).
ExportParseResult parse_wos_export(std::string_view bytes);
ExportParseResult parse_wos_export_file(const std::filesystem::path& path);

struct MergeReport {
  std::size_t matched = 0;
  std::size_t unmatched_ti = 0;      // UT absent or not found in the export
  std::size_t unmatched_export = 0;  // export rows joining no TI row
  long total_citations = 0;          // sum of TC over matched rows
  std::size_t cited = 0;
  std::size_t uncited = 0;

  friend bool operator==(const MergeReport&, const MergeReport&) = default;
};

// Categories of one matched document, kept in TI order for the analytics
// step.
struct MatchedCategories {
  std::string pmid;
  std::string wos_ut;
  std::vector<std::string> categories;

  friend bool operator==(const MatchedCategories&, const MatchedCategories&) = default;
};

struct MergeOutcome {
  MergeReport report;
  std::vector<MatchedCategories> matched_categories;
  std::size_t duplicate_uts = 0;  // export repeats collapsed to the max TC
};

// Joins the export onto TI by accession. Matched rows get times_cited set;
// unmatched rows keep whatever they had (a previous merge is never cleared).
// Duplicate accessions in the export resolve to the maximum TC.
MergeOutcome merge_citations(tables::TableSet& tables,
                             const std::vector<WosExportRecord>& export_records);

}  // namespace meshcite::wos
