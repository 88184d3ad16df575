#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace meshcite::medline {

// One qualifier of a MeSH heading, e.g. "genetics" in "MH  - Brugada
// Syndrome/*genetics". A leading '*' in the source marks a major topic and is
// stripped from the stored text.
struct MeshQualifier {
  std::string text;
  bool major = false;

  friend bool operator==(const MeshQualifier&, const MeshQualifier&) = default;
};

struct MeshHeading {
  std::string descriptor;
  bool descriptor_major = false;
  std::vector<MeshQualifier> qualifiers;

  friend bool operator==(const MeshHeading&, const MeshHeading&) = default;
};

// One parsed MEDLINE flat-file record. Structured fields are derived from
// raw_fields, which keeps every (tag, value) pair in file order; serializing
// raw_fields and re-parsing reproduces the record exactly.
struct MedlineRecord {
  std::string pmid;
  std::string title;
  std::optional<std::string> abstract_text;
  std::string journal_title;
  std::optional<std::string> journal_abbrev;
  std::optional<int> pub_year;
  std::string pub_date_raw;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;
  std::vector<std::string> authors;
  std::vector<MeshHeading> mesh_headings;
  // 15-character WoS accession, filled from a UT tag when the source carries
  // one (Thomson-Reuters Medline edition); otherwise left for the crosswalk.
  std::optional<std::string> wos_ut;
  std::vector<std::pair<std::string, std::string>> raw_fields;

  friend bool operator==(const MedlineRecord&, const MedlineRecord&) = default;
};

struct ParseIssue {
  enum class Kind {
    missing_pmid,  // record block without a usable PMID tag; block is skipped
    invalid_ut,    // UT tag that does not normalize to a 15-char accession
  };
  Kind kind;
  std::size_t record_index = 0;  // 1-based index of the block in the input
  std::string detail;

  friend bool operator==(const ParseIssue&, const ParseIssue&) = default;
};

struct ParseReport {
  std::size_t records_parsed = 0;
  std::size_t blocks_seen = 0;
  std::size_t replaced_bytes = 0;  // invalid UTF-8 bytes replaced with U+FFFD
  std::vector<ParseIssue> issues;
};

struct ParseResult {
  std::vector<MedlineRecord> records;
  ParseReport report;
};

// Parses MEDLINE flat-format text: 4-character tag, "- ", value; continuation
// lines begin with exactly six spaces and are joined with a single space;
// blank lines separate records. Input is decoded as UTF-8 with invalid bytes
// replaced (and counted in the report). Blocks without a PMID are skipped and
// reported, never silently dropped.
//
// Throws MalformedTagLine for a line that fits none of the three shapes.
ParseResult parse_medline_text(std::string_view text);
ParseResult parse_medline_file(const std::filesystem::path& path);

// Parses one MH field value. Leading '*' marks a major topic on the
// descriptor or on a qualifier; '/' separates the descriptor from qualifiers.
// Asterisks never survive into the stored text. Empty qualifier segments
// ("X//Y") are dropped. Throws EmptyDescriptor when nothing remains.
MeshHeading parse_mesh_field(std::string_view value);

// Renders raw_fields back into MEDLINE layout, one tag line per field with
// the full (already joined) value on a single line.
std::string serialize_record(const MedlineRecord& record);

// All records, separated by single blank lines, with a trailing newline.
std::string serialize_records(const std::vector<MedlineRecord>& records);

// Keeps records carrying the descriptor (case-insensitive, qualifiers
// ignored) whose pub_year lies in the inclusive range when one is given.
// Order-preserving and idempotent.
std::vector<MedlineRecord> filter_by_mesh(const std::vector<MedlineRecord>& records,
                                          std::string_view descriptor,
                                          std::optional<std::pair<int, int>> year_range = {});

// Normalizes a raw accession value to the canonical 15-character form:
// surrounding whitespace and a "WOS:" prefix are removed, all-digit strings
// shorter than 15 are zero-padded on the left. Returns nullopt when the
// result is not 15 alphanumeric characters.
std::optional<std::string> normalize_ut(std::string_view raw);

}  // namespace meshcite::medline
