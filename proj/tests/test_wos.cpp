#include <doctest.h>

#include <random>

#include "meshcite/errors.hpp"
#include "meshcite/medline.hpp"
#include "meshcite/wos.hpp"
#include "support/test_support.hpp"

using namespace meshcite;
using namespace meshcite::wos;

namespace {

tables::TableSet brugada_tables() {
  return tables::build_tables(
      medline::parse_medline_file(testsupport::data_dir() / "brugada" / "medline.txt").records);
}

std::string to_utf16le(std::string_view ascii) {
  std::string bytes = "\xFF\xFE";
  for (char c : ascii) {
    bytes.push_back(c);
    bytes.push_back('\0');
  }
  return bytes;
}

}  // namespace

TEST_CASE("a data row splits into accession, count, categories") {
  auto result = parse_wos_export(
      "UT\tTC\tWC\n"
      "000298415800028\t4\tCardiac & Cardiovascular Systems; Hematology\n");
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].wos_ut == "000298415800028");
  CHECK(result.records[0].times_cited == 4);
  CHECK(result.records[0].categories ==
        std::vector<std::string>{"Cardiac & Cardiovascular Systems", "Hematology"});
  CHECK(result.issues.empty());
}

TEST_CASE("an empty TC cell reads as zero") {
  auto result = parse_wos_export("UT\tTC\tWC\n000298415800028\t\tHematology\n");
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].times_cited == 0);
}

TEST_CASE("a header-only export is an empty list") {
  CHECK(parse_wos_export("UT\tTC\tWC\n").records.empty());
  CHECK(parse_wos_export("UT\tTC\tWC").records.empty());
}

TEST_CASE("missing required columns are named") {
  try {
    parse_wos_export("UT\tWC\nx\ty\n");
    FAIL("expected MissingColumn");
  } catch (const MissingColumn& e) {
    CHECK(e.column == "TC");
  }
  CHECK_THROWS_AS(parse_wos_export(""), MissingColumn);
}

TEST_CASE("a non-numeric TC reports its row") {
  try {
    parse_wos_export("UT\tTC\tWC\n000000000000001\t3\tA\n000000000000002\tfour\tA\n");
    FAIL("expected BadTcValue");
  } catch (const BadTcValue& e) {
    CHECK(e.row == 2);
  }
  CHECK_THROWS_AS(parse_wos_export("UT\tTC\tWC\n000000000000001\t-2\tA\n"), BadTcValue);
}

TEST_CASE("rows without any category are reported") {
  auto result = parse_wos_export("UT\tTC\tWC\n000000000000001\t3\t\n");
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].categories.empty());
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].row == 1);
}

TEST_CASE("extra columns and the PM field pass through") {
  auto result = parse_wos_export(
      "PT\tUT\tTC\tZ9\tWC\tPM\n"
      "J\tWOS:000000000000009\t7\t8\tSurgery\t12345\n");
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].wos_ut == "000000000000009");
  CHECK(result.records[0].pubmed_id == "12345");
}

TEST_CASE("UTF-16 exports with BOM decode transparently") {
  auto bytes = to_utf16le("UT\tTC\tWC\n000298415800028\t4\tHematology\n");
  auto result = parse_wos_export(bytes);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].times_cited == 4);
  CHECK(result.records[0].categories == std::vector<std::string>{"Hematology"});

  std::string be = "\xFE\xFF";
  for (char c : std::string("UT\tTC\tWC\n000298415800028\t4\tHematology\n")) {
    be.push_back('\0');
    be.push_back(c);
  }
  auto result_be = parse_wos_export(be);
  REQUIRE(result_be.records.size() == 1);
  CHECK(result_be.records[0].categories == std::vector<std::string>{"Hematology"});
}

TEST_CASE("merging the first snapshot reproduces its aggregates") {
  auto t = brugada_tables();
  auto exp = parse_wos_export_file(testsupport::data_dir() / "brugada" / "wos_feb2012.txt");
  REQUIRE(exp.issues.empty());
  auto outcome = merge_citations(t, exp.records);
  CHECK(outcome.report.matched == 235);
  CHECK(outcome.report.cited == 114);
  CHECK(outcome.report.uncited == 121);
  CHECK(outcome.report.total_citations == 435);
  CHECK(outcome.report.unmatched_ti == 51);
  CHECK(outcome.report.unmatched_export == 0);
  CHECK(outcome.matched_categories.size() == 235);
}

TEST_CASE("merging the later snapshot reproduces its aggregates") {
  auto t = brugada_tables();
  auto exp = parse_wos_export_file(testsupport::data_dir() / "brugada" / "wos_june2012.txt");
  auto outcome = merge_citations(t, exp.records);
  CHECK(outcome.report.matched == 235);
  CHECK(outcome.report.cited == 126);
  CHECK(outcome.report.uncited == 109);
  CHECK(outcome.report.total_citations == 608);
}

TEST_CASE("an empty export changes nothing") {
  auto t = brugada_tables();
  auto before = t;
  auto outcome = merge_citations(t, {});
  CHECK(outcome.report.matched == 0);
  CHECK(outcome.report.unmatched_ti == 286);
  CHECK(t == before);
}

TEST_CASE("duplicate export accessions resolve to the maximum count") {
  tables::TableSet t;
  t.ti.push_back({1, "1", "000000000000001", "t", "j", 2010, {}, {}, {}, std::nullopt});
  std::vector<WosExportRecord> exp = {
      {"000000000000001", 3, {"A"}, std::nullopt},
      {"000000000000001", 9, {"A"}, std::nullopt},
      {"000000000000001", 5, {"A"}, std::nullopt},
  };
  auto outcome = merge_citations(t, exp);
  CHECK(outcome.duplicate_uts == 2);
  CHECK(t.ti[0].times_cited == 9);
  CHECK(outcome.report.total_citations == 9);
}

TEST_CASE("a merge never clears an earlier value and re-merging is idempotent") {
  auto t = brugada_tables();
  auto exp = parse_wos_export_file(testsupport::data_dir() / "brugada" / "wos_june2012.txt");
  merge_citations(t, exp.records);
  auto after_first = t;

  // Re-merge of the same export: same table again.
  auto second = merge_citations(t, exp.records);
  CHECK(t == after_first);
  CHECK(second.report.matched == 235);

  // A later empty merge leaves earlier citation counts in place.
  merge_citations(t, {});
  CHECK(t == after_first);
}

TEST_CASE("report identities hold over random fixtures") {
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> tc(0, 40);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int round = 0; round < 50; ++round) {
    tables::TableSet t;
    std::vector<WosExportRecord> exp;
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, 60)(rng);
    for (std::size_t i = 1; i <= n; ++i) {
      std::optional<std::string> ut;
      if (coin(rng) < 0.8) {
        ut = testsupport::random_ut(rng);
        if (coin(rng) < 0.7) {
          exp.push_back({*ut, tc(rng), {"A"}, std::nullopt});
        }
      }
      t.ti.push_back({i, std::to_string(i), ut, "t", "j", 2010, {}, {}, {}, std::nullopt});
    }
    if (coin(rng) < 0.3 && !exp.empty()) {
      exp.push_back({testsupport::random_ut(rng), tc(rng), {"B"}, std::nullopt});
    }
    auto outcome = merge_citations(t, exp);
    const auto& r = outcome.report;
    CHECK(r.cited + r.uncited == r.matched);
    CHECK(r.matched + r.unmatched_ti == t.ti.size());
    long sum = 0;
    for (const auto& row : t.ti) {
      if (row.times_cited) {
        sum += *row.times_cited;
      }
    }
    CHECK(sum == r.total_citations);
    CHECK(outcome.matched_categories.size() == r.matched);
  }
}
