#include "meshcite/tables.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "meshcite/csv.hpp"
#include "meshcite/errors.hpp"

namespace meshcite::tables {

namespace {

const std::vector<std::string> kTiHeader = {"seq",     "pmid",   "wos_ut", "title",
                                            "journal_title", "pub_year", "volume", "issue",
                                            "first_page",    "times_cited"};
const std::vector<std::string> kAuHeader = {"seq", "position", "author"};
const std::vector<std::string> kMhHeader = {"seq",        "position",       "descriptor",
                                            "descriptor_major", "qualifier", "qualifier_major"};

std::string opt_str(const std::optional<std::string>& v) { return v ? *v : std::string(); }

std::string opt_num(const std::optional<long>& v) { return v ? std::to_string(*v) : std::string(); }

std::string opt_year(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::optional<std::string> parse_opt_str(const std::string& s) {
  if (s.empty()) {
    return std::nullopt;
  }
  return s;
}

long parse_long(const std::string& s, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaMismatch(std::string("not an integer ") + what + ": \"" + s + "\"");
  }
  return value;
}

std::optional<long> parse_opt_long(const std::string& s, const char* what) {
  if (s.empty()) {
    return std::nullopt;
  }
  return parse_long(s, what);
}

bool parse_bool(const std::string& s, const char* what) {
  if (s == "1") {
    return true;
  }
  if (s == "0") {
    return false;
  }
  throw SchemaMismatch(std::string("not a 0/1 flag ") + what + ": \"" + s + "\"");
}

void require_header(const std::vector<std::vector<std::string>>& rows,
                    const std::vector<std::string>& expected, const std::string& file) {
  if (rows.empty() || rows.front() != expected) {
    throw SchemaMismatch("header of " + file + " differs from the canonical schema");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoFailure("cannot write " + path.string());
  }
  return out;
}

// ---- DBF (dBase III, version byte 0x03, character fields only) ------------

struct DbfField {
  const char* name;  // <= 10 chars
  std::size_t width;
  bool right_justified;  // numeric-as-text fields
};

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

class DbfWriter {
 public:
  DbfWriter(std::vector<DbfField> fields, const std::filesystem::path& path)
      : fields_(std::move(fields)), path_(path) {}

  void add_row(std::size_t seq, const std::vector<std::string>& values) {
    std::string row;
    row.push_back(' ');  // active-record marker
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      const auto& f = fields_[i];
      const auto& v = values[i];
      if (v.size() > f.width) {
        throw DbfFieldOverflow(f.name, seq, v.size(), f.width);
      }
      std::string padding(f.width - v.size(), ' ');
      row.append(f.right_justified ? padding + v : v + padding);
    }
    rows_.append(row);
    ++count_;
  }

  void finish() const {
    std::string out;
    std::size_t record_size = 1;
    for (const auto& f : fields_) {
      record_size += f.width;
    }
    std::size_t header_size = 32 + 32 * fields_.size() + 1;

    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);

    out.push_back(0x03);  // dBase III, no memo
    out.push_back(static_cast<char>(tm.tm_year % 100));
    out.push_back(static_cast<char>(tm.tm_mon + 1));
    out.push_back(static_cast<char>(tm.tm_mday));
    put_u32(out, static_cast<std::uint32_t>(count_));
    put_u16(out, static_cast<std::uint16_t>(header_size));
    put_u16(out, static_cast<std::uint16_t>(record_size));
    out.append(20, '\0');

    for (const auto& f : fields_) {
      std::string name(f.name);
      name.resize(11, '\0');
      out.append(name);
      out.push_back('C');
      out.append(4, '\0');
      out.push_back(static_cast<char>(f.width));
      out.push_back('\0');  // decimal count
      out.append(14, '\0');
    }
    out.push_back(0x0D);
    out.append(rows_);
    out.push_back(0x1A);

    auto stream = open_out(path_);
    stream.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!stream) {
      throw IoFailure("short write to " + path_.string());
    }
  }

 private:
  std::vector<DbfField> fields_;
  std::filesystem::path path_;
  std::string rows_;
  std::size_t count_ = 0;
};

void append_ti_row(std::ofstream& out, const TiRow& r);

WritePaths write_csv_tables(const TableSet& tables, const std::filesystem::path& dir) {
  WritePaths paths{dir / "ti.csv", dir / "au.csv", dir / "mh.csv"};

  auto ti = open_out(paths.ti);
  csv::write_row(ti, kTiHeader);
  for (const auto& r : tables.ti) {
    append_ti_row(ti, r);
  }

  auto au = open_out(paths.au);
  csv::write_row(au, kAuHeader);
  for (const auto& r : tables.au) {
    csv::write_row(au, {std::to_string(r.seq), std::to_string(r.position), r.author});
  }

  auto mh = open_out(paths.mh);
  csv::write_row(mh, kMhHeader);
  for (const auto& r : tables.mh) {
    csv::write_row(mh, {std::to_string(r.seq), std::to_string(r.position), r.descriptor,
                        r.descriptor_major ? "1" : "0", opt_str(r.qualifier),
                        r.qualifier_major ? (*r.qualifier_major ? "1" : "0") : ""});
  }
  return paths;
}

WritePaths write_dbf_tables(const TableSet& tables, const std::filesystem::path& dir) {
  WritePaths paths{dir / "ti.dbf", dir / "au.dbf", dir / "mh.dbf"};

  DbfWriter ti({{"SEQ", 7, true},
                {"PMID", 10, false},
                {"WOS_UT", 15, false},
                {"TITLE", 254, false},
                {"JOURNAL", 150, false},
                {"PUBYEAR", 4, true},
                {"VOLUME", 10, false},
                {"ISSUE", 10, false},
                {"FIRSTPAGE", 10, false},
                {"TIMESCITED", 7, true}},
               paths.ti);
  for (const auto& r : tables.ti) {
    ti.add_row(r.seq, {std::to_string(r.seq), r.pmid, opt_str(r.wos_ut), r.title,
                       r.journal_title, opt_year(r.pub_year), opt_str(r.volume),
                       opt_str(r.issue), opt_str(r.first_page), opt_num(r.times_cited)});
  }
  ti.finish();

  DbfWriter au({{"SEQ", 7, true}, {"POSITION", 4, true}, {"AUTHOR", 100, false}}, paths.au);
  for (const auto& r : tables.au) {
    au.add_row(r.seq, {std::to_string(r.seq), std::to_string(r.position), r.author});
  }
  au.finish();

  DbfWriter mh({{"SEQ", 7, true},
                {"POSITION", 4, true},
                {"DESCRIPTOR", 120, false},
                {"DESCMAJOR", 1, false},
                {"QUALIFIER", 60, false},
                {"QUALMAJOR", 1, false}},
               paths.mh);
  for (const auto& r : tables.mh) {
    mh.add_row(r.seq, {std::to_string(r.seq), std::to_string(r.position), r.descriptor,
                       r.descriptor_major ? "1" : "0", opt_str(r.qualifier),
                       r.qualifier_major ? (*r.qualifier_major ? "1" : "0") : ""});
  }
  mh.finish();
  return paths;
}

}  // namespace

TableSet build_tables(const std::vector<medline::MedlineRecord>& records) {
  TableSet tables;
  std::unordered_set<std::string> seen_pmids;
  tables.ti.reserve(records.size());

  std::size_t seq = 0;
  for (const auto& rec : records) {
    ++seq;
    if (rec.pmid.empty()) {
      throw Error("record " + std::to_string(seq) + " has an empty pmid");
    }
    if (!seen_pmids.insert(rec.pmid).second) {
      throw DuplicatePmid(rec.pmid);
    }

    TiRow ti;
    ti.seq = seq;
    ti.pmid = rec.pmid;
    ti.wos_ut = rec.wos_ut;
    ti.title = rec.title;
    ti.journal_title = rec.journal_title;
    ti.pub_year = rec.pub_year;
    ti.volume = rec.volume;
    ti.issue = rec.issue;
    ti.first_page = rec.first_page;
    tables.ti.push_back(std::move(ti));

    for (std::size_t a = 0; a < rec.authors.size(); ++a) {
      tables.au.push_back({seq, a + 1, rec.authors[a]});
    }
    for (std::size_t h = 0; h < rec.mesh_headings.size(); ++h) {
      const auto& heading = rec.mesh_headings[h];
      if (heading.qualifiers.empty()) {
        tables.mh.push_back(
            {seq, h + 1, heading.descriptor, heading.descriptor_major, std::nullopt, std::nullopt});
      } else {
        for (const auto& q : heading.qualifiers) {
          tables.mh.push_back(
              {seq, h + 1, heading.descriptor, heading.descriptor_major, q.text, q.major});
        }
      }
    }
  }
  return tables;
}

void check_integrity(const TableSet& tables) {
  std::unordered_set<std::string> pmids;
  std::set<std::size_t> seqs;
  for (const auto& r : tables.ti) {
    if (!pmids.insert(r.pmid).second) {
      throw Error("TI integrity: duplicate pmid " + r.pmid);
    }
    if (!seqs.insert(r.seq).second) {
      throw Error("TI integrity: duplicate seq " + std::to_string(r.seq));
    }
  }
  if (!seqs.empty() && (*seqs.begin() != 1 || *seqs.rbegin() != seqs.size())) {
    throw Error("TI integrity: seq values not contiguous from 1");
  }
  for (const auto& r : tables.au) {
    if (!seqs.contains(r.seq)) {
      throw Error("AU integrity: seq " + std::to_string(r.seq) + " not in TI");
    }
  }
  for (const auto& r : tables.mh) {
    if (!seqs.contains(r.seq)) {
      throw Error("MH integrity: seq " + std::to_string(r.seq) + " not in TI");
    }
  }
}

WritePaths write_tables(const TableSet& tables, TableFormat format,
                        const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  return format == TableFormat::csv ? write_csv_tables(tables, directory)
                                    : write_dbf_tables(tables, directory);
}

namespace {

void append_ti_row(std::ofstream& out, const TiRow& r) {
  csv::write_row(out, {std::to_string(r.seq), r.pmid, opt_str(r.wos_ut), r.title, r.journal_title,
                       opt_year(r.pub_year), opt_str(r.volume), opt_str(r.issue),
                       opt_str(r.first_page), opt_num(r.times_cited)});
}

TiRow parse_ti_row(const std::vector<std::string>& r) {
  TiRow row;
  row.seq = static_cast<std::size_t>(parse_long(r[0], "seq"));
  row.pmid = r[1];
  row.wos_ut = parse_opt_str(r[2]);
  row.title = r[3];
  row.journal_title = r[4];
  if (auto y = parse_opt_long(r[5], "pub_year")) {
    row.pub_year = static_cast<int>(*y);
  }
  row.volume = parse_opt_str(r[6]);
  row.issue = parse_opt_str(r[7]);
  row.first_page = parse_opt_str(r[8]);
  row.times_cited = parse_opt_long(r[9], "times_cited");
  return row;
}

}  // namespace

void write_ti_csv(const std::vector<TiRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  csv::write_row(out, kTiHeader);
  for (const auto& r : rows) {
    append_ti_row(out, r);
  }
}

std::vector<TiRow> read_ti_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw SchemaMismatch("table file missing: " + path.string());
  }
  auto rows = csv::read_file(path);
  require_header(rows, kTiHeader, path.string());
  std::vector<TiRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != kTiHeader.size()) {
      throw SchemaMismatch(path.string() + ": row " + std::to_string(i) + " has wrong arity");
    }
    out.push_back(parse_ti_row(rows[i]));
  }
  return out;
}

TableSet read_tables(const std::filesystem::path& directory) {
  auto load = [&](const char* name, const std::vector<std::string>& header) {
    auto path = directory / name;
    if (!std::filesystem::exists(path)) {
      throw SchemaMismatch("table file missing: " + path.string());
    }
    auto rows = csv::read_file(path);
    require_header(rows, header, path.string());
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != header.size()) {
        throw SchemaMismatch(path.string() + ": row " + std::to_string(i) + " has " +
                             std::to_string(rows[i].size()) + " fields, expected " +
                             std::to_string(header.size()));
      }
    }
    return rows;
  };

  TableSet tables;
  auto ti_rows = load("ti.csv", kTiHeader);
  for (std::size_t i = 1; i < ti_rows.size(); ++i) {
    tables.ti.push_back(parse_ti_row(ti_rows[i]));
  }

  auto au_rows = load("au.csv", kAuHeader);
  for (std::size_t i = 1; i < au_rows.size(); ++i) {
    const auto& r = au_rows[i];
    tables.au.push_back({static_cast<std::size_t>(parse_long(r[0], "seq")),
                         static_cast<std::size_t>(parse_long(r[1], "position")), r[2]});
  }

  auto mh_rows = load("mh.csv", kMhHeader);
  for (std::size_t i = 1; i < mh_rows.size(); ++i) {
    const auto& r = mh_rows[i];
    MhRow row;
    row.seq = static_cast<std::size_t>(parse_long(r[0], "seq"));
    row.position = static_cast<std::size_t>(parse_long(r[1], "position"));
    row.descriptor = r[2];
    row.descriptor_major = parse_bool(r[3], "descriptor_major");
    row.qualifier = parse_opt_str(r[4]);
    if (row.qualifier) {
      row.qualifier_major = parse_bool(r[5], "qualifier_major");
    } else if (!r[5].empty()) {
      throw SchemaMismatch("mh.csv: qualifier_major set without a qualifier");
    }
    tables.mh.push_back(std::move(row));
  }

  check_integrity(tables);
  return tables;
}

}  // namespace meshcite::tables
