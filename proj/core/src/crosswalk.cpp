#include "meshcite/crosswalk.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "meshcite/csv.hpp"
#include "meshcite/errors.hpp"
#include "meshcite/medline.hpp"

namespace meshcite::crosswalk {

namespace {
constexpr std::size_t kUtLen = 15;
}

void IdentifierMap::insert(const std::string& pmid, const std::string& ut) {
  auto normalized = medline::normalize_ut(ut);
  if (!normalized) {
    throw InvalidAccession(ut);
  }
  auto [it, inserted] = pmid_to_ut.emplace(pmid, *normalized);
  if (!inserted) {
    throw DuplicateMapping("pmid " + pmid + " maps to both " + it->second + " and " + *normalized);
  }
  // Injectivity in the other direction.
  for (const auto& [other_pmid, other_ut] : pmid_to_ut) {
    if (other_ut == *normalized && other_pmid != pmid) {
      throw DuplicateMapping("accession " + *normalized + " mapped from both pmid " + other_pmid +
                             " and pmid " + pmid);
    }
  }
}

IdentifierMap IdentifierMap::load_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"pmid", "wos_ut"}) {
    throw SchemaMismatch("crosswalk file " + path.string() + " must start with header pmid,wos_ut");
  }
  IdentifierMap map;
  std::unordered_set<std::string> seen_uts;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw SchemaMismatch(path.string() + ": row " + std::to_string(i) + " is not two columns");
    }
    const auto& pmid = rows[i][0];
    auto ut = medline::normalize_ut(rows[i][1]);
    if (pmid.empty() || !ut) {
      throw InvalidAccession(rows[i][0] + "," + rows[i][1]);
    }
    if (!seen_uts.insert(*ut).second) {
      throw DuplicateMapping("accession " + *ut + " appears twice in " + path.string());
    }
    if (!map.pmid_to_ut.emplace(pmid, *ut).second) {
      throw DuplicateMapping("pmid " + pmid + " appears twice in " + path.string());
    }
  }
  return map;
}

FillReport apply_crosswalk(tables::TableSet& tables, const IdentifierMap& map) {
  FillReport report;
  for (auto& row : tables.ti) {
    auto it = map.pmid_to_ut.find(row.pmid);
    if (row.wos_ut) {
      ++report.already_present;
      if (it != map.pmid_to_ut.end() && it->second != *row.wos_ut) {
        ++report.conflicts;  // never overwrite
      }
    } else if (it != map.pmid_to_ut.end()) {
      row.wos_ut = it->second;
      ++report.filled;
    } else {
      ++report.still_missing;
    }
  }
  return report;
}

QueryResult generate_ut_queries(const std::vector<std::string>& uts, QueryOptions options) {
  if (uts.empty()) {
    throw EmptyInput("no accessions to build queries from");
  }
  QueryResult result;
  std::vector<std::string> unique;
  unique.reserve(uts.size());
  std::unordered_set<std::string> seen;
  for (const auto& ut : uts) {
    if (ut.size() != kUtLen ||
        !std::all_of(ut.begin(), ut.end(), [](unsigned char c) { return std::isalnum(c); })) {
      throw InvalidAccession(ut);
    }
    if (seen.insert(ut).second) {
      unique.push_back(ut);
    } else {
      ++result.duplicates_dropped;
    }
  }

  const std::string prefix = options.space_after_ut ? "UT= (" : "UT=(";
  const std::size_t base = prefix.size() + 1;  // prefix plus closing paren
  if (options.max_len < base + kUtLen) {
    throw MaxLenTooSmall(options.max_len, base + kUtLen);
  }

  // Greedy left-to-right packing: extend the current query while it fits.
  std::vector<std::string> current;
  std::size_t current_len = 0;  // length with current UTs included
  auto flush = [&] {
    if (current.empty()) {
      return;
    }
    std::string query = prefix;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (i) {
        query += " OR ";
      }
      query += current[i];
    }
    query += ")";
    result.batch.queries.push_back(std::move(query));
    result.batch.uts_per_query.push_back(std::move(current));
    current.clear();
    current_len = 0;
  };

  for (const auto& ut : unique) {
    std::size_t next_len =
        current.empty() ? base + ut.size() : current_len + 4 + ut.size();  // " OR "
    if (next_len > options.max_len) {
      flush();
      next_len = base + ut.size();
    }
    current.push_back(ut);
    current_len = next_len;
  }
  flush();
  return result;
}

std::vector<std::string> parse_ut_query(std::string_view query) {
  auto fail = [&](const std::string& why) -> void {
    throw Error("not a UT query (" + why + "): \"" + std::string(query) + "\"");
  };
  if (!query.starts_with("UT=")) {
    fail("missing UT= prefix");
  }
  query.remove_prefix(3);
  if (query.starts_with(" ")) {
    query.remove_prefix(1);
  }
  if (!query.starts_with("(") || !query.ends_with(")")) {
    fail("missing parentheses");
  }
  query.remove_prefix(1);
  query.remove_suffix(1);

  std::vector<std::string> uts;
  std::size_t pos = 0;
  while (true) {
    auto sep = query.find(" OR ", pos);
    std::string_view token =
        query.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
    if (token.size() != kUtLen ||
        !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isalnum(c); })) {
      fail("bad accession token \"" + std::string(token) + "\"");
    }
    uts.emplace_back(token);
    if (sep == std::string_view::npos) {
      break;
    }
    pos = sep + 4;
  }
  return uts;
}

void enforce_system_cap(const std::vector<std::string>& uts, std::size_t cap) {
  if (uts.size() > cap) {
    throw CapExceeded(uts.size(), cap);
  }
}

CitmatchResult format_citmatch(const tables::TableSet& tables) {
  CitmatchResult result;
  // First author per record, if any.
  std::unordered_map<std::size_t, const std::string*> first_author;
  for (const auto& au : tables.au) {
    if (au.position == 1) {
      first_author[au.seq] = &au.author;
    }
  }
  for (const auto& row : tables.ti) {
    if (row.journal_title.empty()) {
      result.issues.push_back({row.seq, CitmatchIssue::Field::journal});
      continue;
    }
    if (!row.pub_year) {
      result.issues.push_back({row.seq, CitmatchIssue::Field::year});
      continue;
    }
    auto author_it = first_author.find(row.seq);
    std::string line = row.journal_title + "|" + std::to_string(*row.pub_year) + "|" +
                       (row.volume ? *row.volume : "") + "|" +
                       (row.first_page ? *row.first_page : "") + "|" +
                       (author_it != first_author.end() ? *author_it->second : "") + "|K" +
                       row.pmid + "|";
    result.lines.push_back(std::move(line));
  }
  return result;
}

}  // namespace meshcite::crosswalk
