#include "meshcite/exporters.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meshcite/errors.hpp"

namespace meshcite::exporters {

namespace {

using nlohmann::json;

constexpr int kReportSchemaVersion = 1;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoFailure("cannot write " + path.string());
  }
  return out;
}

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

std::string fmt2(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

json distribution_to_json(const analytics::CategoryDistribution& dist) {
  json categories = json::array();
  for (const auto& [category, count] : analytics::ranked_counts(dist)) {
    categories.push_back({{"category", category},
                          {"count", count},
                          {"proportion", dist.total_attributions > 0
                                             ? static_cast<double>(count) / dist.total_attributions
                                             : 0.0}});
  }
  return {{"n_documents", dist.n_documents},
          {"total_attributions", dist.total_attributions},
          {"categories", categories}};
}

}  // namespace

VosPaths export_vosviewer(const analytics::CategoryDistribution& dist,
                          const analytics::SimilarityMatrix* sim,
                          const std::filesystem::path& directory, const LayoutMap* layout) {
  if (dist.counts.empty()) {
    throw EmptyDistribution();
  }
  std::filesystem::create_directories(directory);
  VosPaths paths;
  paths.map_file = directory / "vosviewer_map.txt";

  auto ranked = analytics::ranked_counts(dist);
  bool with_layout = layout != nullptr;

  auto map = open_out(paths.map_file);
  map << "id\tlabel\tweight";
  if (with_layout) {
    map << "\tx\ty\tcluster";
  }
  map << "\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    map << (i + 1) << "\t" << ranked[i].first << "\t" << ranked[i].second;
    if (with_layout) {
      auto it = layout->find(ranked[i].first);
      if (it != layout->end()) {
        map << "\t" << fmt(it->second.x) << "\t" << fmt(it->second.y) << "\t"
            << (it->second.cluster ? std::to_string(*it->second.cluster) : "");
      } else {
        map << "\t\t\t";
      }
    }
    map << "\n";
  }

  if (sim != nullptr) {
    paths.network_file = directory / "vosviewer_network.txt";
    auto net = open_out(*paths.network_file);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      auto a = sim->index_of(ranked[i].first);
      if (!a) {
        throw UnknownCategory(ranked[i].first);
      }
      for (std::size_t j = i + 1; j < ranked.size(); ++j) {
        auto b = sim->index_of(ranked[j].first);
        if (!b) {
          throw UnknownCategory(ranked[j].first);
        }
        double s = sim->at(*a, *b);
        if (s > 0.0) {
          net << (i + 1) << "\t" << (j + 1) << "\t" << fmt(s) << "\n";
        }
      }
    }
  }
  return paths;
}

std::filesystem::path export_pajek(const analytics::CategoryDistribution& dist,
                                   const analytics::SimilarityMatrix& sim,
                                   const std::filesystem::path& path) {
  if (dist.counts.empty()) {
    throw EmptyDistribution();
  }
  auto ranked = analytics::ranked_counts(dist);
  auto out = open_out(path);
  out << "*Vertices " << ranked.size() << "\n";
  std::vector<std::size_t> sim_index(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto idx = sim.index_of(ranked[i].first);
    if (!idx) {
      throw UnknownCategory(ranked[i].first);
    }
    sim_index[i] = *idx;
    std::string label = ranked[i].first;
    // Pajek quoting: embedded quotes are not representable; drop them.
    std::erase(label, '"');
    out << (i + 1) << " \"" << label << "\"\n";
  }
  out << "*Edges\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    for (std::size_t j = i + 1; j < ranked.size(); ++j) {
      double s = sim.at(sim_index[i], sim_index[j]);
      if (s > 0.0) {
        out << (i + 1) << " " << (j + 1) << " " << fmt(s) << "\n";
      }
    }
  }
  return path;
}

void render_rank_plot(const analytics::RankSeries& series, const std::filesystem::path& path) {
  if (series.values.empty()) {
    throw EmptySeries();
  }
  constexpr double width = 860, height = 540;
  constexpr double left = 70, right = 30, top = 56, bottom = 58;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  long max_value = *std::max_element(series.values.begin(), series.values.end());
  long y_max = std::max<long>(1, max_value);
  std::size_t n = series.values.size();

  auto x_of = [&](std::size_t rank) {  // rank is 1-based
    if (n == 1) {
      return left + plot_w / 2.0;
    }
    return left + plot_w * (static_cast<double>(rank - 1) / static_cast<double>(n - 1));
  };
  auto y_of = [&](long value) {
    return top + plot_h * (1.0 - static_cast<double>(value) / static_cast<double>(y_max));
  };

  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  std::string annotation = std::to_string(n) + " ranked papers, " + std::to_string(series.total) +
                           " citations, " + std::to_string(series.zeros) + " uncited";
  out << "  <text x=\"" << fmt2(width / 2) << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">Citation ranking: "
      << xml_escape(annotation) << "</text>\n";

  // Axes.
  out << "  <line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top + plot_h) << "\" x2=\""
      << fmt2(left + plot_w) << "\" y2=\"" << fmt2(top + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "  <line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left)
      << "\" y2=\"" << fmt2(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // A few y ticks.
  int y_ticks = y_max < 4 ? static_cast<int>(y_max) : 4;
  for (int t = 0; t <= y_ticks; ++t) {
    long value = y_max * t / (y_ticks == 0 ? 1 : y_ticks);
    double y = y_of(value);
    out << "  <line x1=\"" << fmt2(left - 4) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(left)
        << "\" y2=\"" << fmt2(y) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt2(left - 8) << "\" y=\"" << fmt2(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << value
        << "</text>\n";
  }
  // X ticks at the first and last rank.
  for (std::size_t rank : {std::size_t{1}, n}) {
    double x = x_of(rank);
    out << "  <line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(top + plot_h) << "\" x2=\"" << fmt2(x)
        << "\" y2=\"" << fmt2(top + plot_h + 4) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt2(x) << "\" y=\"" << fmt2(top + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << rank
        << "</text>\n";
    if (n == 1) {
      break;
    }
  }

  out << "  <text x=\"" << fmt2(left + plot_w / 2) << "\" y=\"" << fmt2(height - 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">Rank</text>\n";
  out << "  <text x=\"20\" y=\"" << fmt2(top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
      << fmt2(top + plot_h / 2) << ")\">Times cited</text>\n";

  if (n > 1) {
    out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) {
        out << " ";
      }
      out << fmt2(x_of(i + 1)) << "," << fmt2(y_of(series.values[i]));
    }
    out << "\"/>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    out << "  <circle cx=\"" << fmt2(x_of(i + 1)) << "\" cy=\"" << fmt2(y_of(series.values[i]))
        << "\" r=\"2\" fill=\"#1f77b4\"/>\n";
  }
  out << "</svg>\n";
}

void write_report(const ReportInputs& inputs, const std::filesystem::path& json_path,
                  const std::filesystem::path& md_path) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["run"] = inputs.run_config;

  if (inputs.merge) {
    j["merge"] = {{"matched", inputs.merge->matched},
                  {"unmatched_ti", inputs.merge->unmatched_ti},
                  {"unmatched_export", inputs.merge->unmatched_export},
                  {"total_citations", inputs.merge->total_citations},
                  {"cited", inputs.merge->cited},
                  {"uncited", inputs.merge->uncited}};
  } else {
    j["merge"] = nullptr;
  }

  j["distribution"] = inputs.distribution ? distribution_to_json(*inputs.distribution) : json();

  json diversity;
  diversity["rao_stirling"] = inputs.diversity ? json(*inputs.diversity) : json();
  diversity["similarity_source"] = inputs.similarity_source;
  j["diversity"] = diversity;

  json core;
  core["category"] = inputs.core_category ? json(*inputs.core_category) : json();
  core["share"] = inputs.core_share ? json(*inputs.core_share) : json();
  if (inputs.core_category && inputs.distribution) {
    auto it = inputs.distribution->counts.find(*inputs.core_category);
    core["count"] = it != inputs.distribution->counts.end() ? json(it->second) : json(0);
  } else {
    core["count"] = nullptr;
  }
  j["core"] = core;

  if (inputs.ranking) {
    j["ranking"] = {{"n", inputs.ranking->values.size()},
                    {"total", inputs.ranking->total},
                    {"zeros", inputs.ranking->zeros},
                    {"values", inputs.ranking->values}};
  } else {
    j["ranking"] = nullptr;
  }

  auto jf = open_out(json_path);
  jf << j.dump(2) << "\n";

  // Markdown rendering.
  auto md = open_out(md_path);
  md << "# Citation analysis report\n\n";

  md << "## Run configuration\n\n";
  if (inputs.run_config.empty()) {
    md << "(none recorded)\n";
  } else {
    for (const auto& [key, value] : inputs.run_config) {
      md << "- " << key << ": " << value << "\n";
    }
  }
  md << "\n## Merge summary\n\n";
  if (inputs.merge) {
    md << "- matched: " << inputs.merge->matched << "\n"
       << "- unmatched TI rows: " << inputs.merge->unmatched_ti << "\n"
       << "- unmatched export rows: " << inputs.merge->unmatched_export << "\n"
       << "- total citations: " << inputs.merge->total_citations << "\n"
       << "- cited: " << inputs.merge->cited << "\n"
       << "- uncited: " << inputs.merge->uncited << "\n";
  } else {
    md << "- no merge performed (0 exports)\n";
  }

  md << "\n## Category distribution\n\n";
  if (inputs.distribution && !inputs.distribution->counts.empty()) {
    md << "Categories attributed to " << inputs.distribution->n_documents << " documents ("
       << inputs.distribution->total_attributions << " attributions):\n\n";
    md << "| Category | Count | Proportion |\n|---|---:|---:|\n";
    char buffer[32];
    for (const auto& [category, count] : analytics::ranked_counts(*inputs.distribution)) {
      std::snprintf(buffer, sizeof buffer, "%.4f",
                    static_cast<double>(count) / inputs.distribution->total_attributions);
      md << "| " << category << " | " << count << " | " << buffer << " |\n";
    }
  } else {
    md << "(empty: 0 categories, 0 attributions)\n";
  }

  md << "\n## Core category\n\n";
  if (inputs.core_category && inputs.core_share) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.0f", *inputs.core_share * 100.0);
    md << "- " << *inputs.core_category << ": share " << buffer << "% of documents\n";
  } else {
    md << "- not computed\n";
  }

  md << "\n## Diversity\n\n";
  if (inputs.diversity) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4f", *inputs.diversity);
    md << "- Rao-Stirling diversity: " << buffer << " (similarity: " << inputs.similarity_source
       << ")\n";
  } else {
    md << "- not computed\n";
  }

  md << "\n## Citation ranking\n\n";
  if (inputs.ranking) {
    md << "- " << inputs.ranking->values.size() << " ranked papers, " << inputs.ranking->total
       << " citations, " << inputs.ranking->zeros << " uncited\n";
  } else {
    md << "- 0 ranked papers\n";
  }
}

ReportInputs read_report_json(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) {
    throw IoFailure("cannot open " + json_path.string());
  }
  json j = json::parse(in);

  ReportInputs inputs;
  if (j.contains("run")) {
    for (const auto& [key, value] : j["run"].items()) {
      inputs.run_config[key] = value.get<std::string>();
    }
  }
  if (j.contains("merge") && !j["merge"].is_null()) {
    wos::MergeReport m;
    m.matched = j["merge"]["matched"].get<std::size_t>();
    m.unmatched_ti = j["merge"]["unmatched_ti"].get<std::size_t>();
    m.unmatched_export = j["merge"]["unmatched_export"].get<std::size_t>();
    m.total_citations = j["merge"]["total_citations"].get<long>();
    m.cited = j["merge"]["cited"].get<std::size_t>();
    m.uncited = j["merge"]["uncited"].get<std::size_t>();
    inputs.merge = m;
  }
  if (j.contains("distribution") && !j["distribution"].is_null()) {
    analytics::CategoryDistribution dist;
    dist.n_documents = j["distribution"]["n_documents"].get<std::size_t>();
    dist.total_attributions = j["distribution"]["total_attributions"].get<long>();
    for (const auto& entry : j["distribution"]["categories"]) {
      dist.counts[entry["category"].get<std::string>()] = entry["count"].get<long>();
    }
    inputs.distribution = std::move(dist);
  }
  if (j.contains("diversity")) {
    if (!j["diversity"]["rao_stirling"].is_null()) {
      inputs.diversity = j["diversity"]["rao_stirling"].get<double>();
    }
    inputs.similarity_source = j["diversity"]["similarity_source"].get<std::string>();
  }
  if (j.contains("core")) {
    if (!j["core"]["category"].is_null()) {
      inputs.core_category = j["core"]["category"].get<std::string>();
    }
    if (!j["core"]["share"].is_null()) {
      inputs.core_share = j["core"]["share"].get<double>();
    }
  }
  if (j.contains("ranking") && !j["ranking"].is_null()) {
    analytics::RankSeries series;
    series.total = j["ranking"]["total"].get<long>();
    series.zeros = j["ranking"]["zeros"].get<std::size_t>();
    for (const auto& v : j["ranking"]["values"]) {
      series.values.push_back(v.get<long>());
    }
    inputs.ranking = std::move(series);
  }
  return inputs;
}

}  // namespace meshcite::exporters
