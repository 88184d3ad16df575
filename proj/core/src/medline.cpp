#include "meshcite/medline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "meshcite/errors.hpp"

namespace meshcite::medline {

namespace {

bool is_all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// Replaces invalid UTF-8 bytes with U+FFFD and counts them.
std::string sanitize_utf8(std::string_view in, std::size_t& replaced) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t continuations = 0;
    unsigned char first_lo = 0x80, first_hi = 0xBF;
    if (c >= 0xC2 && c <= 0xDF) {
      continuations = 1;
    } else if (c == 0xE0) {
      continuations = 2;
      first_lo = 0xA0;
    } else if ((c >= 0xE1 && c <= 0xEC) || c == 0xEE || c == 0xEF) {
      continuations = 2;
    } else if (c == 0xED) {
      continuations = 2;
      first_hi = 0x9F;
    } else if (c == 0xF0) {
      continuations = 3;
      first_lo = 0x90;
    } else if (c >= 0xF1 && c <= 0xF3) {
      continuations = 3;
    } else if (c == 0xF4) {
      continuations = 3;
      first_hi = 0x8F;
    } else {
      out.append(kReplacement);
      ++replaced;
      ++i;
      continue;
    }
    bool ok = i + continuations < in.size();
    for (std::size_t k = 1; ok && k <= continuations; ++k) {
      unsigned char cc = static_cast<unsigned char>(in[i + k]);
      unsigned char lo = (k == 1) ? first_lo : 0x80;
      unsigned char hi = (k == 1) ? first_hi : 0xBF;
      ok = cc >= lo && cc <= hi;
    }
    if (ok) {
      out.append(in.substr(i, continuations + 1));
      i += continuations + 1;
    } else {
      out.append(kReplacement);
      ++replaced;
      ++i;
    }
  }
  return out;
}

std::optional<int> extract_year(std::string_view date_raw) {
  for (std::size_t i = 0; i + 4 <= date_raw.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(date_raw[i])) &&
        std::isdigit(static_cast<unsigned char>(date_raw[i + 1])) &&
        std::isdigit(static_cast<unsigned char>(date_raw[i + 2])) &&
        std::isdigit(static_cast<unsigned char>(date_raw[i + 3]))) {
      int year = (date_raw[i] - '0') * 1000 + (date_raw[i + 1] - '0') * 100 +
                 (date_raw[i + 2] - '0') * 10 + (date_raw[i + 3] - '0');
      if (year >= 1000 && year <= 2999) {
        return year;
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> nonempty(std::string_view s) {
  auto t = trim(s);
  if (t.empty()) {
    return std::nullopt;
  }
  return std::string(t);
}

// Derives the structured fields of a record from its raw (tag, value) pairs.
void derive_fields(MedlineRecord& rec, std::size_t record_index, ParseReport& report) {
  for (const auto& [tag, value] : rec.raw_fields) {
    if (tag == "PMID" && rec.pmid.empty()) {
      auto t = trim(value);
      if (is_all_digits(t)) {
        rec.pmid = std::string(t);
      }
    } else if (tag == "TI" && rec.title.empty()) {
      rec.title = value;
    } else if (tag == "AB" && !rec.abstract_text) {
      rec.abstract_text = value;
    } else if (tag == "JT" && rec.journal_title.empty()) {
      rec.journal_title = value;
    } else if (tag == "TA" && !rec.journal_abbrev) {
      rec.journal_abbrev = nonempty(value);
    } else if (tag == "DP" && rec.pub_date_raw.empty()) {
      rec.pub_date_raw = value;
      rec.pub_year = extract_year(value);
    } else if (tag == "VI" && !rec.volume) {
      rec.volume = nonempty(value);
    } else if (tag == "IP" && !rec.issue) {
      rec.issue = nonempty(value);
    } else if (tag == "PG" && !rec.first_page) {
      auto t = trim(value);
      auto dash = t.find('-');
      rec.first_page = nonempty(dash == std::string_view::npos ? t : t.substr(0, dash));
    } else if (tag == "AU") {
      rec.authors.emplace_back(value);
    } else if (tag == "MH") {
      rec.mesh_headings.push_back(parse_mesh_field(value));
    } else if (tag == "UT" && !rec.wos_ut) {
      rec.wos_ut = normalize_ut(value);
      if (!rec.wos_ut) {
        report.issues.push_back(
            {ParseIssue::Kind::invalid_ut, record_index, "UT value \"" + value + "\""});
      }
    }
  }
}

}  // namespace

std::optional<std::string> normalize_ut(std::string_view raw) {
  auto t = trim(raw);
  if (t.size() >= 4) {
    std::string head(t.substr(0, 4));
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (head == "WOS:") {
      t.remove_prefix(4);
    }
  }
  if (t.empty() || t.size() > 15) {
    return std::nullopt;
  }
  if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isalnum(c); })) {
    return std::nullopt;
  }
  if (t.size() < 15) {
    if (!is_all_digits(t)) {
      return std::nullopt;
    }
    return std::string(15 - t.size(), '0') + std::string(t);
  }
  return std::string(t);
}

MeshHeading parse_mesh_field(std::string_view value) {
  MeshHeading heading;
  std::size_t start = 0;
  std::size_t segment_index = 0;
  while (start <= value.size()) {
    auto slash = value.find('/', start);
    std::string_view segment = value.substr(
        start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    bool major = !segment.empty() && segment.front() == '*';
    std::string text;
    text.reserve(segment.size());
    for (char c : segment) {
      if (c != '*') {
        text.push_back(c);
      }
    }
    if (segment_index == 0) {
      if (text.empty()) {
        throw EmptyDescriptor(std::string(value));
      }
      heading.descriptor = std::move(text);
      heading.descriptor_major = major;
    } else if (!text.empty()) {
      heading.qualifiers.push_back({std::move(text), major});
    }
    ++segment_index;
    if (slash == std::string_view::npos) {
      break;
    }
    start = slash + 1;
  }
  return heading;
}

ParseResult parse_medline_text(std::string_view input) {
  ParseResult result;
  std::size_t replaced = 0;
  std::string text = sanitize_utf8(input, replaced);
  result.report.replaced_bytes = replaced;

  std::string_view view = text;
  // Strip a UTF-8 BOM; common in files that passed through Windows tools.
  if (view.starts_with("\xEF\xBB\xBF")) {
    view.remove_prefix(3);
  }

  std::vector<std::pair<std::string, std::string>> fields;
  bool in_record = false;

  auto finish_record = [&] {
    if (!in_record) {
      return;
    }
    ++result.report.blocks_seen;
    MedlineRecord rec;
    rec.raw_fields = std::move(fields);
    fields.clear();
    derive_fields(rec, result.report.blocks_seen, result.report);
    if (rec.pmid.empty()) {
      result.report.issues.push_back(
          {ParseIssue::Kind::missing_pmid, result.report.blocks_seen, "record block has no PMID"});
    } else {
      result.records.push_back(std::move(rec));
      ++result.report.records_parsed;
    }
    in_record = false;
  };

  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= view.size()) {
    if (pos == view.size()) {
      break;
    }
    auto eol = view.find('\n', pos);
    std::string_view line =
        view.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? view.size() : eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }

    if (is_blank(line)) {
      finish_record();
      continue;
    }
    // Tag line: 4-character tag (left-justified, padded), then "- ".
    if (line.size() >= 6 && line[0] != ' ' && line[4] == '-' && line[5] == ' ') {
      std::string_view tag = trim(line.substr(0, 4));
      fields.emplace_back(std::string(tag), std::string(line.substr(6)));
      in_record = true;
      continue;
    }
    // Continuation: six leading spaces, content joined with a single space.
    if (line.size() > 6 && line.substr(0, 6) == "      ") {
      if (fields.empty()) {
        throw MalformedTagLine(line_number, std::string(line));
      }
      fields.back().second.append(" ");
      fields.back().second.append(line.substr(6));
      continue;
    }
    throw MalformedTagLine(line_number, std::string(line));
  }
  finish_record();
  return result;
}

ParseResult parse_medline_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoFailure("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_medline_text(buffer.str());
}

std::string serialize_record(const MedlineRecord& record) {
  std::string out;
  for (const auto& [tag, value] : record.raw_fields) {
    out.append(tag);
    out.append(4 - tag.size(), ' ');
    out.append("- ");
    out.append(value);
    out.push_back('\n');
  }
  return out;
}

std::string serialize_records(const std::vector<MedlineRecord>& records) {
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i) {
      out.push_back('\n');
    }
    out.append(serialize_record(records[i]));
  }
  return out;
}

std::vector<MedlineRecord> filter_by_mesh(const std::vector<MedlineRecord>& records,
                                          std::string_view descriptor,
                                          std::optional<std::pair<int, int>> year_range) {
  auto fold = [](std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return lower;
  };
  std::string wanted = fold(descriptor);

  std::vector<MedlineRecord> out;
  for (const auto& rec : records) {
    bool has_descriptor =
        std::any_of(rec.mesh_headings.begin(), rec.mesh_headings.end(),
                    [&](const MeshHeading& h) { return fold(h.descriptor) == wanted; });
    if (!has_descriptor) {
      continue;
    }
    if (year_range) {
      if (!rec.pub_year || *rec.pub_year < year_range->first ||
          *rec.pub_year > year_range->second) {
        continue;
      }
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace meshcite::medline
