#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "meshcite/medline.hpp"

namespace meshcite::tables {

// One row of the TI table: the per-document fields. times_cited stays absent
// until a merge; absent ("never matched in WoS") and 0 ("matched, uncited")
// are distinct states and serialize differently.
//
// Optional text fields are normalized: empty strings become absent, so the
// CSV round trip is exact.
struct TiRow {
  std::size_t seq = 0;  // 1-based, contiguous
  std::string pmid;
  std::optional<std::string> wos_ut;
  std::string title;
  std::string journal_title;
  std::optional<int> pub_year;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;
  std::optional<long> times_cited;

  friend bool operator==(const TiRow&, const TiRow&) = default;
};

struct AuRow {
  std::size_t seq = 0;
  std::size_t position = 0;  // 1-based author position within the record
  std::string author;

  friend bool operator==(const AuRow&, const AuRow&) = default;
};

// One row per (descriptor, qualifier) pair: a heading with k qualifiers
// yields k rows sharing the heading's position, a heading without qualifiers
// yields one row with the qualifier absent.
struct MhRow {
  std::size_t seq = 0;
  std::size_t position = 0;  // 1-based heading position within the record
  std::string descriptor;
  bool descriptor_major = false;
  std::optional<std::string> qualifier;
  std::optional<bool> qualifier_major;

  friend bool operator==(const MhRow&, const MhRow&) = default;
};

struct TableSet {
  std::vector<TiRow> ti;
  std::vector<AuRow> au;
  std::vector<MhRow> mh;

  friend bool operator==(const TableSet&, const TableSet&) = default;
};

enum class TableFormat { csv, dbf };

struct WritePaths {
  std::filesystem::path ti;
  std::filesystem::path au;
  std::filesystem::path mh;
};

// Builds the three relational tables from parsed records, in input order.
// Throws DuplicatePmid when two records share a pmid.
TableSet build_tables(const std::vector<medline::MedlineRecord>& records);

// Verifies seq contiguity on TI, pmid uniqueness, and AU/MH -> TI referential
// integrity. Throws Error on violation.
void check_integrity(const TableSet& tables);

// Writes ti/au/mh files into the directory. CSV is the canonical, lossless
// format; DBF (dBase III, text fields only) is a compatibility writer whose
// values must fit the declared field widths (DbfFieldOverflow otherwise).
WritePaths write_tables(const TableSet& tables, TableFormat format,
                        const std::filesystem::path& directory);

// Exact inverse of the CSV writer. Throws SchemaMismatch when a file is
// missing or its header row differs from the canonical schema.
TableSet read_tables(const std::filesystem::path& directory);

// The TI table alone, same canonical CSV schema as ti.csv. Used for derived
// artifacts (e.g. the merged table) that must not overwrite the built one.
void write_ti_csv(const std::vector<TiRow>& rows, const std::filesystem::path& path);
std::vector<TiRow> read_ti_csv(const std::filesystem::path& path);

}  // namespace meshcite::tables
