#include <doctest.h>

#include <sstream>

#include "meshcite/errors.hpp"
#include "meshcite/exporters.hpp"
#include "support/test_support.hpp"

using namespace meshcite;
using namespace meshcite::exporters;
using meshcite::analytics::CategoryDistribution;
using meshcite::analytics::RankSeries;
using meshcite::analytics::SimilarityMatrix;
using testsupport::TempDir;

namespace {

CategoryDistribution two_cats() {
  CategoryDistribution dist;
  dist.counts = {{"Alpha", 8}, {"Beta", 3}};
  dist.total_attributions = 11;
  dist.n_documents = 9;
  return dist;
}

std::vector<std::string> lines_of(const std::filesystem::path& path) {
  std::istringstream in(testsupport::read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("map file rows follow descending weight with stable ids") {
  CategoryDistribution dist;
  dist.counts = {{"C", 2}, {"A", 9}, {"B", 2}};
  dist.total_attributions = 13;
  TempDir dir;
  auto paths = export_vosviewer(dist, nullptr, dir.path());
  auto lines = lines_of(paths.map_file);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "id\tlabel\tweight");
  CHECK(lines[1] == "1\tA\t9");
  CHECK(lines[2] == "2\tB\t2");  // tie broken by label
  CHECK(lines[3] == "3\tC\t2");
  CHECK_FALSE(paths.network_file.has_value());
}

TEST_CASE("network rows carry the similarity for i < j") {
  auto dist = two_cats();
  SimilarityMatrix sim({"Alpha", "Beta"}, {1.0, 0.5, 0.5, 1.0});
  TempDir dir;
  auto paths = export_vosviewer(dist, &sim, dir.path());
  REQUIRE(paths.network_file.has_value());
  auto lines = lines_of(*paths.network_file);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "1\t2\t0.5");
}

TEST_CASE("one category gives a single-row map and an empty network") {
  CategoryDistribution dist;
  dist.counts = {{"Only", 4}};
  dist.total_attributions = 4;
  SimilarityMatrix sim = SimilarityMatrix::all_distinct({"Only"});
  TempDir dir;
  auto paths = export_vosviewer(dist, &sim, dir.path());
  CHECK(lines_of(paths.map_file).size() == 2);
  REQUIRE(paths.network_file.has_value());
  CHECK(testsupport::read_file(*paths.network_file).empty());
}

TEST_CASE("layout coordinates pass through when given") {
  auto dist = two_cats();
  LayoutMap layout;
  layout["Alpha"] = {1.25, -0.5, 2};
  layout["Beta"] = {0.0, 3.5, std::nullopt};
  TempDir dir;
  auto paths = export_vosviewer(dist, nullptr, dir.path(), &layout);
  auto lines = lines_of(paths.map_file);
  CHECK(lines[0] == "id\tlabel\tweight\tx\ty\tcluster");
  CHECK(lines[1] == "1\tAlpha\t8\t1.25\t-0.5\t2");
  CHECK(lines[2] == "2\tBeta\t3\t0\t3.5\t");
}

TEST_CASE("empty distribution cannot be exported") {
  TempDir dir;
  CHECK_THROWS_AS(export_vosviewer(CategoryDistribution{}, nullptr, dir.path()),
                  EmptyDistribution);
}

TEST_CASE("pajek headers and sections") {
  TempDir dir;
  SUBCASE("24-vertex fixture") {
    CategoryDistribution dist;
    std::vector<std::string> labels;
    for (int i = 0; i < 24; ++i) {
      std::string name = "Category " + std::to_string(i);
      dist.counts[name] = 24 - i;
      dist.total_attributions += 24 - i;
      labels.push_back(name);
    }
    auto sim = SimilarityMatrix::all_distinct(labels);
    auto path = export_pajek(dist, sim, dir / "net.net");
    auto lines = lines_of(path);
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "*Vertices 24");
    // identity matrix: no off-diagonal weight, so the edge section is empty
    CHECK(lines.back() == "*Edges");
    CHECK(lines.size() == 26);
  }
  SUBCASE("single vertex") {
    CategoryDistribution dist;
    dist.counts = {{"Only", 1}};
    dist.total_attributions = 1;
    auto sim = SimilarityMatrix::all_distinct({"Only"});
    auto lines = lines_of(export_pajek(dist, sim, dir / "one.net"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "*Vertices 1");
    CHECK(lines[1] == "1 \"Only\"");
    CHECK(lines[2] == "*Edges");
  }
  SUBCASE("edges carry weights for i < j") {
    auto dist = two_cats();
    SimilarityMatrix sim({"Alpha", "Beta"}, {1.0, 0.25, 0.25, 1.0});
    auto lines = lines_of(export_pajek(dist, sim, dir / "w.net"));
    REQUIRE(lines.size() == 5);
    CHECK(lines[3] == "*Edges");
    CHECK(lines[4] == "1 2 0.25");
  }
}

TEST_CASE("rank plot annotation carries the totals") {
  RankSeries series;
  series.values = {40, 20, 10, 0, 0};
  series.total = 70;
  series.zeros = 2;
  TempDir dir;
  render_rank_plot(series, dir / "plot.svg");
  auto svg = testsupport::read_file(dir / "plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("5 ranked papers") != std::string::npos);
  CHECK(svg.find("70 citations") != std::string::npos);
  CHECK(svg.find("2 uncited") != std::string::npos);
}

TEST_CASE("degenerate rank plots still render") {
  TempDir dir;
  RankSeries one;
  one.values = {3};
  one.total = 3;
  render_rank_plot(one, dir / "one.svg");
  auto svg = testsupport::read_file(dir / "one.svg");
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.find("<polyline") == std::string::npos);

  RankSeries flat;
  flat.values = {0, 0, 0, 0};
  flat.zeros = 4;
  render_rank_plot(flat, dir / "flat.svg");
  CHECK(testsupport::read_file(dir / "flat.svg").find("<polyline") != std::string::npos);

  CHECK_THROWS_AS(render_rank_plot(RankSeries{}, dir / "no.svg"), EmptySeries);
}

TEST_CASE("report json and markdown") {
  TempDir dir;
  ReportInputs inputs;
  wos::MergeReport merge;
  merge.matched = 235;
  merge.unmatched_ti = 51;
  merge.unmatched_export = 0;
  merge.total_citations = 608;
  merge.cited = 126;
  merge.uncited = 109;
  inputs.merge = merge;
  CategoryDistribution dist;
  dist.counts = {{"Cardiac Cardiovascular Systems", 186}, {"Medicine General Internal", 24}};
  dist.total_attributions = 210;
  dist.n_documents = 235;
  inputs.distribution = dist;
  inputs.diversity = 0.42;
  inputs.similarity_source = "toy.csv";
  inputs.core_category = "Cardiac Cardiovascular Systems";
  inputs.core_share = 186.0 / 235.0;
  RankSeries series;
  series.values = {9, 1, 0};
  series.total = 10;
  series.zeros = 1;
  inputs.ranking = series;
  inputs.run_config = {{"mesh", "Brugada Syndrome"}};

  write_report(inputs, dir / "report.json", dir / "report.md");

  SUBCASE("markdown table starts at the core category") {
    auto md = testsupport::read_file(dir / "report.md");
    auto header_pos = md.find("| Category | Count | Proportion |");
    REQUIRE(header_pos != std::string::npos);
    auto first_row = md.find("| Cardiac Cardiovascular Systems | 186 |");
    REQUIRE(first_row != std::string::npos);
    auto second_row = md.find("| Medicine General Internal | 24 |");
    CHECK(first_row < second_row);
    CHECK(md.find("share 79% of documents") != std::string::npos);
  }

  SUBCASE("json reads back to equal structures") {
    auto back = read_report_json(dir / "report.json");
    CHECK(back.merge == inputs.merge);
    CHECK(back.distribution == inputs.distribution);
    CHECK(back.diversity == inputs.diversity);
    CHECK(back.similarity_source == inputs.similarity_source);
    CHECK(back.core_category == inputs.core_category);
    CHECK(back.core_share == doctest::Approx(*inputs.core_share).epsilon(1e-12));
    CHECK(back.ranking == inputs.ranking);
    CHECK(back.run_config == inputs.run_config);
  }
}

TEST_CASE("an empty run still writes explicit zero sections") {
  TempDir dir;
  ReportInputs inputs;
  write_report(inputs, dir / "report.json", dir / "report.md");
  auto md = testsupport::read_file(dir / "report.md");
  CHECK(md.find("no merge performed (0 exports)") != std::string::npos);
  CHECK(md.find("(empty: 0 categories, 0 attributions)") != std::string::npos);
  CHECK(md.find("0 ranked papers") != std::string::npos);
  auto back = read_report_json(dir / "report.json");
  CHECK_FALSE(back.merge.has_value());
  CHECK_FALSE(back.distribution.has_value());
  CHECK_FALSE(back.diversity.has_value());
}

TEST_CASE("exports are byte-deterministic") {
  auto dist = two_cats();
  SimilarityMatrix sim({"Alpha", "Beta"}, {1.0, 0.5, 0.5, 1.0});
  TempDir a, b;
  export_vosviewer(dist, &sim, a.path());
  export_vosviewer(dist, &sim, b.path());
  CHECK(testsupport::read_file(a / "vosviewer_map.txt") ==
        testsupport::read_file(b / "vosviewer_map.txt"));
  CHECK(testsupport::read_file(a / "vosviewer_network.txt") ==
        testsupport::read_file(b / "vosviewer_network.txt"));
}
