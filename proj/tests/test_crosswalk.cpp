#include <doctest.h>

#include <limits>

#include "meshcite/crosswalk.hpp"
#include "meshcite/errors.hpp"
#include "meshcite/medline.hpp"
#include "support/test_support.hpp"

using namespace meshcite;
using namespace meshcite::crosswalk;
using testsupport::TempDir;

namespace {

tables::TableSet brugada_tables() {
  static auto tables = tables::build_tables(
      medline::parse_medline_file(testsupport::data_dir() / "brugada" / "medline.txt").records);
  return tables;
}

tables::TableSet one_row(const std::string& pmid, std::optional<std::string> ut) {
  tables::TableSet t;
  t.ti.push_back({1, pmid, std::move(ut), "t", "j", 2010, {}, {}, {}, std::nullopt});
  return t;
}

}  // namespace

TEST_CASE("a missing accession fills from the map") {
  auto t = one_row("7", std::nullopt);
  IdentifierMap map;
  map.insert("7", "000000000000007");
  auto report = apply_crosswalk(t, map);
  CHECK(report.filled == 1);
  CHECK(report.still_missing == 0);
  CHECK(report.conflicts == 0);
  CHECK(t.ti[0].wos_ut == "000000000000007");
}

TEST_CASE("a disagreeing map entry never overwrites") {
  auto t = one_row("7", "000000000000001");
  IdentifierMap map;
  map.insert("7", "000000000000002");
  auto report = apply_crosswalk(t, map);
  CHECK(report.conflicts == 1);
  CHECK(report.already_present == 1);
  CHECK(t.ti[0].wos_ut == "000000000000001");
}

TEST_CASE("fixture against the empty map reports coverage") {
  auto t = brugada_tables();
  auto report = apply_crosswalk(t, IdentifierMap{});
  CHECK(report.already_present == 235);
  CHECK(report.still_missing == 51);
  CHECK(report.filled == 0);
  CHECK(report.conflicts == 0);
}

TEST_CASE("applying a crosswalk twice changes nothing more") {
  auto t = brugada_tables();
  auto map = IdentifierMap::load_csv(testsupport::data_dir() / "brugada" / "crosswalk.csv");
  auto first = apply_crosswalk(t, map);
  CHECK(first.filled == 10);
  CHECK(first.still_missing == 41);
  auto snapshot = t;
  auto second = apply_crosswalk(t, map);
  CHECK(t == snapshot);
  CHECK(second.filled == 0);
  CHECK(second.already_present == 245);
}

TEST_CASE("crosswalk file collisions are load errors") {
  TempDir dir;
  SUBCASE("pmid repeated") {
    testsupport::write_file(dir / "x.csv",
                            "pmid,wos_ut\n1,000000000000001\n1,000000000000002\n");
    CHECK_THROWS_AS(IdentifierMap::load_csv(dir / "x.csv"), DuplicateMapping);
  }
  SUBCASE("accession repeated") {
    testsupport::write_file(dir / "x.csv",
                            "pmid,wos_ut\n1,000000000000001\n2,000000000000001\n");
    CHECK_THROWS_AS(IdentifierMap::load_csv(dir / "x.csv"), DuplicateMapping);
  }
  SUBCASE("wrong header") {
    testsupport::write_file(dir / "x.csv", "a,b\n1,000000000000001\n");
    CHECK_THROWS_AS(IdentifierMap::load_csv(dir / "x.csv"), SchemaMismatch);
  }
  SUBCASE("bad accession") {
    testsupport::write_file(dir / "x.csv", "pmid,wos_ut\n1,not-an-accession\n");
    CHECK_THROWS_AS(IdentifierMap::load_csv(dir / "x.csv"), InvalidAccession);
  }
}

TEST_CASE("query strings take the documented exact form") {
  QueryOptions options;
  options.max_len = 10000;
  auto result = generate_ut_queries({"000298415800028", "000297149900006"}, options);
  REQUIRE(result.batch.queries.size() == 1);
  CHECK(result.batch.queries[0] == "UT=(000298415800028 OR 000297149900006)");

  auto single = generate_ut_queries({"000298415800028"});
  REQUIRE(single.batch.queries.size() == 1);
  CHECK(single.batch.queries[0] == "UT=(000298415800028)");
}

TEST_CASE("the spaced variant matches the legacy print form") {
  QueryOptions options;
  options.space_after_ut = true;
  auto result = generate_ut_queries({"000298415800028", "000297149900006"}, options);
  CHECK(result.batch.queries[0] == "UT= (000298415800028 OR 000297149900006)");
  CHECK(parse_ut_query(result.batch.queries[0]) ==
        std::vector<std::string>{"000298415800028", "000297149900006"});
}

TEST_CASE("query generation validates its inputs") {
  CHECK_THROWS_AS(generate_ut_queries({}), EmptyInput);
  QueryOptions tiny;
  tiny.max_len = 19;
  CHECK_THROWS_AS(generate_ut_queries({"000298415800028"}, tiny), MaxLenTooSmall);
  CHECK_THROWS_AS(generate_ut_queries({"short"}), InvalidAccession);
}

TEST_CASE("duplicates drop with a count, first occurrence kept") {
  auto result =
      generate_ut_queries({"000000000000001", "000000000000002", "000000000000001"});
  CHECK(result.duplicates_dropped == 1);
  REQUIRE(result.batch.uts_per_query.size() == 1);
  CHECK(result.batch.uts_per_query[0] ==
        std::vector<std::string>{"000000000000001", "000000000000002"});
}

TEST_CASE("an unbounded budget yields exactly one query") {
  std::mt19937 rng(7);
  std::vector<std::string> uts;
  for (int i = 0; i < 500; ++i) {
    uts.push_back(testsupport::random_ut(rng));
  }
  QueryOptions options;
  options.max_len = std::numeric_limits<std::size_t>::max();
  auto result = generate_ut_queries(uts, options);
  CHECK(result.batch.queries.size() == 1);
}

TEST_CASE("packing matches the character-level oracle on the fixture sizes") {
  std::mt19937 rng(99);
  std::vector<std::string> uts;
  for (int i = 0; i < 235; ++i) {
    uts.push_back(testsupport::random_ut(rng));
  }
  QueryOptions options;
  options.max_len = 100;
  auto result = generate_ut_queries(uts, options);
  auto expected = testsupport::greedy_batch_count_oracle(uts, 100, 4);
  CHECK(result.batch.queries.size() == expected);
  for (const auto& q : result.batch.queries) {
    CHECK(q.size() <= 100);
  }
}

TEST_CASE("concatenating batch accessions reproduces the deduplicated input") {
  std::mt19937 rng(3);
  std::vector<std::string> uts;
  for (int i = 0; i < 100; ++i) {
    uts.push_back(testsupport::random_ut(rng));
  }
  uts.push_back(uts[10]);  // duplicate
  QueryOptions options;
  options.max_len = 200;
  auto result = generate_ut_queries(uts, options);
  std::vector<std::string> flattened;
  for (std::size_t i = 0; i < result.batch.queries.size(); ++i) {
    auto reparsed = parse_ut_query(result.batch.queries[i]);
    CHECK(reparsed == result.batch.uts_per_query[i]);
    flattened.insert(flattened.end(), reparsed.begin(), reparsed.end());
  }
  std::vector<std::string> expected(uts.begin(), uts.end() - 1);
  CHECK(flattened == expected);
}

TEST_CASE("the system cap is boundary-inclusive") {
  std::vector<std::string> uts(235, "x");
  CHECK_NOTHROW(enforce_system_cap(uts));
  uts.resize(100000, "x");
  CHECK_NOTHROW(enforce_system_cap(uts));
  uts.resize(100001, "x");
  try {
    enforce_system_cap(uts);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.count == 100001);
    CHECK(e.cap == 100000);
  }
}

TEST_CASE("citation matcher lines use the pipe layout") {
  tables::TableSet t;
  t.ti.push_back({1, "1392976", std::nullopt, "Right bundle branch block...",
                  "Journal of the American College of Cardiology", 1992, "20", "6", "1391",
                  std::nullopt});
  t.au.push_back({1, 1, "Brugada P"});
  t.au.push_back({1, 2, "Brugada J"});
  auto result = format_citmatch(t);
  REQUIRE(result.lines.size() == 1);
  CHECK(result.lines[0] ==
        "Journal of the American College of Cardiology|1992|20|1391|Brugada P|K1392976|");
}

TEST_CASE("missing optional fields render empty between pipes") {
  tables::TableSet t;
  t.ti.push_back({1, "1", std::nullopt, "t", "J", 2010, std::nullopt, std::nullopt, std::nullopt,
                  std::nullopt});
  t.au.push_back({1, 1, "Smith J"});
  auto result = format_citmatch(t);
  REQUIRE(result.lines.size() == 1);
  CHECK(result.lines[0] == "J|2010|||Smith J|K1|");
}

TEST_CASE("citation matcher collects rows missing journal or year") {
  tables::TableSet t;
  t.ti.push_back({1, "1", std::nullopt, "t", "", 2010, {}, {}, {}, std::nullopt});
  t.ti.push_back({2, "2", std::nullopt, "t", "J", std::nullopt, {}, {}, {}, std::nullopt});
  t.ti.push_back({3, "3", std::nullopt, "t", "J", 2011, {}, {}, {}, std::nullopt});
  auto result = format_citmatch(t);
  CHECK(result.lines.size() == 1);
  REQUIRE(result.issues.size() == 2);
  CHECK(result.issues[0].seq == 1);
  CHECK(result.issues[0].missing == CitmatchIssue::Field::journal);
  CHECK(result.issues[1].seq == 2);
  CHECK(result.issues[1].missing == CitmatchIssue::Field::year);
}

TEST_CASE("an empty table formats to zero lines") {
  auto result = format_citmatch(tables::TableSet{});
  CHECK(result.lines.empty());
  CHECK(result.issues.empty());
}
