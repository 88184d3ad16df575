#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "meshcite/tables.hpp"

namespace meshcite::crosswalk {

inline constexpr std::size_t kDefaultMaxQueryLen = 8000;
inline constexpr std::size_t kWosSystemCap = 100000;

// pmid -> accession bridge, injective in both directions. Loaded from a
// two-column CSV "pmid,wos_ut" with header; collisions are load errors.
struct IdentifierMap {
  std::map<std::string, std::string> pmid_to_ut;

  static IdentifierMap load_csv(const std::filesystem::path& path);
  void insert(const std::string& pmid, const std::string& ut);  // DuplicateMapping on collision
  std::size_t size() const { return pmid_to_ut.size(); }
};

struct FillReport {
  std::size_t already_present = 0;
  std::size_t filled = 0;
  std::size_t still_missing = 0;
  std::size_t conflicts = 0;

  friend bool operator==(const FillReport&, const FillReport&) = default;
};

// Fills missing wos_ut values on TI rows from the map. Existing accessions
// are never overwritten; a map entry that disagrees with one counts as a
// conflict and leaves the row unchanged. Idempotent.
FillReport apply_crosswalk(tables::TableSet& tables, const IdentifierMap& map);

struct QueryBatch {
  std::vector<std::string> queries;
  std::vector<std::vector<std::string>> uts_per_query;  // parallel to queries
};

struct QueryOptions {
  std::size_t max_len = kDefaultMaxQueryLen;
  // Emit "UT= (...)" instead of the canonical "UT=(...)".
  bool space_after_ut = false;
};

struct QueryResult {
  QueryBatch batch;
  std::size_t duplicates_dropped = 0;  // repeats removed, first occurrence kept
};

// Packs accessions greedily left to right into queries of the exact form
// "UT=(U1 OR U2 OR ... OR Uk)", each no longer than max_len. Order is
// preserved within and across batches. Throws EmptyInput, MaxLenTooSmall, or
// InvalidAccession (every UT must be 15 characters).
QueryResult generate_ut_queries(const std::vector<std::string>& uts, QueryOptions options = {});

// Inverse of the generator's grammar "UT=(<ut> ( OR <ut>)*)"; also accepts
// the spaced "UT= (" variant. Throws Error on anything else.
std::vector<std::string> parse_ut_query(std::string_view query);

// Passes iff the set fits the retrieval system's size limit (boundary
// inclusive); throws CapExceeded with the offending count otherwise.
void enforce_system_cap(const std::vector<std::string>& uts, std::size_t cap = kWosSystemCap);

struct CitmatchIssue {
  enum class Field { journal, year };
  std::size_t seq = 0;
  Field missing;

  friend bool operator==(const CitmatchIssue&, const CitmatchIssue&) = default;
};

struct CitmatchResult {
  std::vector<std::string> lines;
  std::vector<CitmatchIssue> issues;  // rows skipped for a missing journal/year
};

// Formats TI rows for the batch citation matcher, one pipe-delimited line per
// row: journal|year|volume|first page|first author|K<pmid>|. Missing optional
// fields render empty between pipes; rows lacking journal or year are
// collected as issues instead of lines.
CitmatchResult format_citmatch(const tables::TableSet& tables);

}  // namespace meshcite::crosswalk
