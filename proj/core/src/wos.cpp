#include "meshcite/wos.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "meshcite/errors.hpp"
#include "meshcite/medline.hpp"

namespace meshcite::wos {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes UTF-16 (with surrogate pairs) to UTF-8; lone surrogates become
// U+FFFD.
std::string utf16_to_utf8(std::string_view bytes, bool big_endian) {
  std::string out;
  out.reserve(bytes.size() / 2);
  auto unit = [&](std::size_t i) -> char32_t {
    unsigned char a = static_cast<unsigned char>(bytes[i]);
    unsigned char b = static_cast<unsigned char>(bytes[i + 1]);
    return big_endian ? (static_cast<char32_t>(a) << 8 | b) : (static_cast<char32_t>(b) << 8 | a);
  };
  std::size_t n = bytes.size() & ~std::size_t{1};
  for (std::size_t i = 0; i < n; i += 2) {
    char32_t u = unit(i);
    if (u >= 0xD800 && u <= 0xDBFF && i + 3 < n) {
      char32_t lo = unit(i + 2);
      if (lo >= 0xDC00 && lo <= 0xDFFF) {
        append_utf8(out, 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
        i += 2;
        continue;
      }
    }
    if (u >= 0xD800 && u <= 0xDFFF) {
      u = 0xFFFD;
    }
    append_utf8(out, u);
  }
  return out;
}

// BOM-based encoding detection; default is UTF-8.
std::string decode_export_bytes(std::string_view bytes) {
  if (bytes.size() >= 2) {
    unsigned char b0 = static_cast<unsigned char>(bytes[0]);
    unsigned char b1 = static_cast<unsigned char>(bytes[1]);
    if (b0 == 0xFF && b1 == 0xFE) {
      return utf16_to_utf8(bytes.substr(2), /*big_endian=*/false);
    }
    if (b0 == 0xFE && b1 == 0xFF) {
      return utf16_to_utf8(bytes.substr(2), /*big_endian=*/true);
    }
  }
  if (bytes.starts_with("\xEF\xBB\xBF")) {
    bytes.remove_prefix(3);
  }
  return std::string(bytes);
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    cells.emplace_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos
                                                                      : tab - pos));
    if (tab == std::string_view::npos) {
      break;
    }
    pos = tab + 1;
  }
  return cells;
}

}  // namespace

ExportParseResult parse_wos_export(std::string_view bytes) {
  std::string text = decode_export_bytes(bytes);
  ExportParseResult result;

  std::vector<std::string_view> lines;
  std::string_view view = text;
  std::size_t pos = 0;
  while (pos < view.size()) {
    auto eol = view.find('\n', pos);
    auto line = view.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    lines.push_back(line);
    pos = eol == std::string_view::npos ? view.size() : eol + 1;
  }
  if (lines.empty() || lines.front().empty()) {
    throw MissingColumn("UT");
  }

  auto header = split_tabs(lines.front());
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    col.emplace(trim(header[i]), i);
  }
  for (const char* required : {"UT", "TC", "WC"}) {
    if (!col.contains(required)) {
      throw MissingColumn(required);
    }
  }
  std::size_t ut_col = col.at("UT");
  std::size_t tc_col = col.at("TC");
  std::size_t wc_col = col.at("WC");
  auto pm_it = col.find("PM");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;  // trailing blank line
    }
    auto cells = split_tabs(lines[i]);
    auto cell = [&](std::size_t idx) { return idx < cells.size() ? trim(cells[idx]) : std::string(); };

    WosExportRecord rec;
    std::string ut_raw = cell(ut_col);
    auto ut = medline::normalize_ut(ut_raw);
    if (!ut) {
      result.issues.push_back({i, "row has no usable UT: \"" + ut_raw + "\""});
      continue;
    }
    rec.wos_ut = *ut;

    std::string tc = cell(tc_col);
    if (tc.empty()) {
      rec.times_cited = 0;
    } else {
      auto [ptr, ec] = std::from_chars(tc.data(), tc.data() + tc.size(), rec.times_cited);
      if (ec != std::errc() || ptr != tc.data() + tc.size() || rec.times_cited < 0) {
        throw BadTcValue(i, tc);
      }
    }

    std::string wc = cell(wc_col);
    std::size_t start = 0;
    while (start <= wc.size() && !wc.empty()) {
      auto semi = wc.find(';', start);
      std::string name =
          trim(std::string_view(wc).substr(start, semi == std::string::npos ? semi : semi - start));
      if (!name.empty()) {
        rec.categories.push_back(std::move(name));
      }
      if (semi == std::string::npos) {
        break;
      }
      start = semi + 1;
    }
    if (rec.categories.empty()) {
      result.issues.push_back({i, "record " + rec.wos_ut + " carries no category"});
    }

    if (pm_it != col.end()) {
      std::string pm = cell(pm_it->second);
      if (!pm.empty()) {
        rec.pubmed_id = pm;
      }
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

ExportParseResult parse_wos_export_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoFailure("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_wos_export(buffer.str());
}

MergeOutcome merge_citations(tables::TableSet& tables,
                             const std::vector<WosExportRecord>& export_records) {
  MergeOutcome outcome;

  // Duplicate accessions collapse to the maximum TC (overlapping batched
  // downloads repeat records).
  std::unordered_map<std::string, const WosExportRecord*> by_ut;
  for (const auto& rec : export_records) {
    auto [it, inserted] = by_ut.emplace(rec.wos_ut, &rec);
    if (!inserted) {
      ++outcome.duplicate_uts;
      if (rec.times_cited > it->second->times_cited) {
        it->second = &rec;
      }
    }
  }

  std::unordered_map<std::string, bool> export_used;
  export_used.reserve(by_ut.size());
  for (const auto& [ut, rec] : by_ut) {
    export_used.emplace(ut, false);
  }

  auto& report = outcome.report;
  for (auto& row : tables.ti) {
    const WosExportRecord* match = nullptr;
    if (row.wos_ut) {
      auto it = by_ut.find(*row.wos_ut);
      if (it != by_ut.end()) {
        match = it->second;
      }
    }
    if (!match) {
      ++report.unmatched_ti;
      continue;  // keep whatever times_cited the row already has
    }
    export_used[match->wos_ut] = true;
    row.times_cited = match->times_cited;
    ++report.matched;
    report.total_citations += match->times_cited;
    if (match->times_cited > 0) {
      ++report.cited;
    } else {
      ++report.uncited;
    }
    outcome.matched_categories.push_back({row.pmid, match->wos_ut, match->categories});
  }
  for (const auto& [ut, used] : export_used) {
    if (!used) {
      ++report.unmatched_export;
    }
  }
  return outcome;
}

}  // namespace meshcite::wos
