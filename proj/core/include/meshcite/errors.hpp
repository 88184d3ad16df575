#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshcite {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& what) : Error(what) {}
};

// -- medline ingest ---------------------------------------------------------

// A line that is neither a tag line, a continuation, nor blank.
class MalformedTagLine : public Error {
 public:
  MalformedTagLine(std::size_t line_number, const std::string& line)
      : Error("malformed line " + std::to_string(line_number) + ": \"" + line + "\""),
        line_number(line_number) {}
  std::size_t line_number;
};

// An MH value that is empty or consists only of '*' and '/'.
class EmptyDescriptor : public Error {
 public:
  explicit EmptyDescriptor(const std::string& value)
      : Error("MH value has no descriptor: \"" + value + "\"") {}
};

// -- record store -----------------------------------------------------------

class DuplicatePmid : public Error {
 public:
  explicit DuplicatePmid(const std::string& pmid)
      : Error("duplicate pmid in input records: " + pmid), pmid(pmid) {}
  std::string pmid;
};

// A value longer than its declared DBF field width. Truncation would lose
// data, so it is an error rather than a silent cut.
class DbfFieldOverflow : public Error {
 public:
  DbfFieldOverflow(const std::string& field, std::size_t seq, std::size_t size,
                   std::size_t width)
      : Error("DBF field " + field + " overflow at seq " + std::to_string(seq) + ": " +
              std::to_string(size) + " bytes exceed declared width " + std::to_string(width)),
        field(field),
        seq(seq) {}
  std::string field;
  std::size_t seq;
};

// Table file missing or its header row differs from the canonical schema.
class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& what) : Error(what) {}
};

// -- crosswalk --------------------------------------------------------------

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error(what) {}
};

class MaxLenTooSmall : public Error {
 public:
  MaxLenTooSmall(std::size_t max_len, std::size_t needed)
      : Error("max_len " + std::to_string(max_len) + " below minimum single-accession query length " +
              std::to_string(needed)) {}
};

class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t count, std::size_t cap)
      : Error("identifier set of " + std::to_string(count) + " exceeds system cap " +
              std::to_string(cap)),
        count(count),
        cap(cap) {}
  std::size_t count;
  std::size_t cap;
};

// A crosswalk file mapping one pmid to two accessions or vice versa.
class DuplicateMapping : public Error {
 public:
  explicit DuplicateMapping(const std::string& what) : Error(what) {}
};

class InvalidAccession : public Error {
 public:
  explicit InvalidAccession(const std::string& value)
      : Error("not a valid 15-character accession: \"" + value + "\"") {}
};

class MissingJournal : public Error {
 public:
  explicit MissingJournal(std::size_t seq)
      : Error("row seq " + std::to_string(seq) + " has no journal title"), seq(seq) {}
  std::size_t seq;
};

class MissingYear : public Error {
 public:
  explicit MissingYear(std::size_t seq)
      : Error("row seq " + std::to_string(seq) + " has no publication year"), seq(seq) {}
  std::size_t seq;
};

// -- wos merge ---------------------------------------------------------------

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& column)
      : Error("export header lacks required column " + column), column(column) {}
  std::string column;
};

class BadTcValue : public Error {
 public:
  BadTcValue(std::size_t row, const std::string& value)
      : Error("row " + std::to_string(row) + ": TC value not a non-negative integer: \"" + value +
              "\""),
        row(row) {}
  std::size_t row;
};

// -- analytics ---------------------------------------------------------------

class UnknownCategory : public Error {
 public:
  explicit UnknownCategory(const std::string& category)
      : Error("category not present in similarity matrix labels: \"" + category + "\""),
        category(category) {}
  std::string category;
};

class EmptyDistribution : public Error {
 public:
  EmptyDistribution() : Error("category distribution has no attributions") {}
};

class DivisionByZero : public Error {
 public:
  explicit DivisionByZero(const std::string& what) : Error(what) {}
};

class InvalidSimilarityMatrix : public Error {
 public:
  explicit InvalidSimilarityMatrix(const std::string& what) : Error(what) {}
};

// -- exporters ---------------------------------------------------------------

class EmptySeries : public Error {
 public:
  EmptySeries() : Error("rank series is empty; nothing to plot") {}
};

// -- fetcher -----------------------------------------------------------------

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& what) : Error(what) {}
};

class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& body_excerpt)
      : Error("service returned HTTP " + std::to_string(status) + ": " + body_excerpt),
        status(status) {}
  int status;
};

class RateLimited : public Error {
 public:
  explicit RateLimited(const std::string& what) : Error(what) {}
};

// Some pages of a paged fetch were saved, others failed or came back short.
class PartialFetch : public Error {
 public:
  PartialFetch(std::vector<std::size_t> pages_written, std::vector<std::string> missing_pmids,
               std::vector<std::size_t> failed_pages)
      : Error("partial fetch: " + std::to_string(pages_written.size()) + " pages written, " +
              std::to_string(failed_pages.size()) + " pages failed, " +
              std::to_string(missing_pmids.size()) + " ids not returned"),
        pages_written(std::move(pages_written)),
        missing_pmids(std::move(missing_pmids)),
        failed_pages(std::move(failed_pages)) {}
  std::vector<std::size_t> pages_written;
  std::vector<std::string> missing_pmids;
  std::vector<std::size_t> failed_pages;
};

// -- cli / pipeline -----------------------------------------------------------

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace meshcite
