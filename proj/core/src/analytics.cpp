#include "meshcite/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "meshcite/csv.hpp"
#include "meshcite/errors.hpp"

namespace meshcite::analytics {

namespace {
constexpr double kSymmetryTolerance = 1e-9;

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t consumed = 0;
    double v = std::stod(s, &consumed);
    if (consumed != s.size()) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw InvalidSimilarityMatrix("not a number at " + where + ": \"" + s + "\"");
  }
}
}  // namespace

CategoryDistribution wc_distribution(
    const std::vector<std::vector<std::string>>& per_record_categories) {
  CategoryDistribution dist;
  dist.n_documents = per_record_categories.size();
  for (const auto& categories : per_record_categories) {
    for (const auto& category : categories) {
      ++dist.counts[category];
      ++dist.total_attributions;
    }
  }
  return dist;
}

double core_share(const CategoryDistribution& dist, const std::string& core) {
  if (dist.n_documents == 0) {
    throw DivisionByZero("core share undefined over zero documents");
  }
  auto it = dist.counts.find(core);
  if (it == dist.counts.end()) {
    return 0.0;
  }
  return static_cast<double>(it->second) / static_cast<double>(dist.n_documents);
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  validate();
}

SimilarityMatrix SimilarityMatrix::all_distinct(std::vector<std::string> labels) {
  std::size_t n = labels.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    values[i * n + i] = 1.0;
  }
  return SimilarityMatrix(std::move(labels), std::move(values));
}

void SimilarityMatrix::validate() const {
  std::size_t n = labels_.size();
  if (values_.size() != n * n) {
    throw InvalidSimilarityMatrix("matrix body is not labels^2 in size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i, i) != 1.0) {
      throw InvalidSimilarityMatrix("diagonal entry for \"" + labels_[i] + "\" is not exactly 1");
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = at(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidSimilarityMatrix("entry (" + labels_[i] + ", " + labels_[j] +
                                      ") outside [0, 1]");
      }
      if (std::abs(at(i, j) - at(j, i)) > kSymmetryTolerance) {
        throw InvalidSimilarityMatrix("matrix not symmetric at (" + labels_[i] + ", " + labels_[j] +
                                      ")");
      }
    }
  }
}

std::optional<std::size_t> SimilarityMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

SimilarityMatrix SimilarityMatrix::load_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().size() < 2) {
    throw InvalidSimilarityMatrix("similarity file " + path.string() +
                                  " lacks a label header row");
  }
  std::vector<std::string> labels(rows.front().begin() + 1, rows.front().end());
  std::size_t n = labels.size();
  if (rows.size() != n + 1) {
    throw InvalidSimilarityMatrix("similarity file " + path.string() + " has " +
                                  std::to_string(rows.size() - 1) + " data rows for " +
                                  std::to_string(n) + " labels");
  }
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != n + 1) {
      throw InvalidSimilarityMatrix(path.string() + ": row " + std::to_string(i + 2) +
                                    " has wrong arity");
    }
    if (row.front() != labels[i]) {
      throw InvalidSimilarityMatrix(path.string() + ": row label \"" + row.front() +
                                    "\" does not match column label \"" + labels[i] + "\"");
    }
    for (std::size_t j = 0; j < n; ++j) {
      values[i * n + j] = parse_double(row[j + 1], "row " + std::to_string(i + 2) + " column " +
                                                       std::to_string(j + 2));
    }
  }
  return SimilarityMatrix(std::move(labels), std::move(values));
}

void SimilarityMatrix::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoFailure("cannot write " + path.string());
  }
  std::vector<std::string> header{""};
  header.insert(header.end(), labels_.begin(), labels_.end());
  csv::write_row(out, header);
  std::ostringstream number;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    std::vector<std::string> row{labels_[i]};
    for (std::size_t j = 0; j < labels_.size(); ++j) {
      number.str("");
      number << at(i, j);
      row.push_back(number.str());
    }
    csv::write_row(out, row);
  }
}

double rao_stirling(const CategoryDistribution& dist, const SimilarityMatrix& sim) {
  if (dist.total_attributions <= 0 || dist.counts.empty()) {
    throw EmptyDistribution();
  }
  std::vector<std::size_t> index;
  std::vector<double> p;
  index.reserve(dist.counts.size());
  p.reserve(dist.counts.size());
  for (const auto& [category, count] : dist.counts) {
    auto idx = sim.index_of(category);
    if (!idx) {
      throw UnknownCategory(category);
    }
    index.push_back(*idx);
    p.push_back(static_cast<double>(count) / static_cast<double>(dist.total_attributions));
  }

  // Sum over ordered pairs i != j of p_i p_j (1 - s_ij), evaluated through
  // the identity (sum p)^2 - p^T S p; the s_ii = 1 diagonal makes the i = j
  // terms cancel exactly.
  double p_sum = 0.0;
  for (double v : p) {
    p_sum += v;
  }
  double quadratic = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    double row_dot = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) {
      row_dot += p[b] * sim.at(index[a], index[b]);
    }
    quadratic += p[a] * row_dot;
  }
  double delta = p_sum * p_sum - quadratic;
  return std::clamp(delta, 0.0, 1.0);
}

RankSeries citation_rank_series(const std::vector<std::optional<long>>& tc_values) {
  RankSeries series;
  for (const auto& tc : tc_values) {
    if (!tc) {
      continue;
    }
    series.values.push_back(*tc);
    series.total += *tc;
    if (*tc == 0) {
      ++series.zeros;
    }
  }
  std::sort(series.values.begin(), series.values.end(), std::greater<>());
  return series;
}

std::vector<std::pair<std::string, long>> ranked_counts(const CategoryDistribution& dist) {
  std::vector<std::pair<std::string, long>> ranked(dist.counts.begin(), dist.counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return a.second > b.second;
    }
    return a.first < b.first;
  });
  return ranked;
}

void write_distribution_csv(const CategoryDistribution& dist, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoFailure("cannot write " + path.string());
  }
  csv::write_row(out, {"category", "count", "proportion"});
  char buffer[64];
  for (const auto& [category, count] : ranked_counts(dist)) {
    double proportion = dist.total_attributions > 0
                            ? static_cast<double>(count) / dist.total_attributions
                            : 0.0;
    std::snprintf(buffer, sizeof buffer, "%.6f", proportion);
    csv::write_row(out, {category, std::to_string(count), buffer});
  }
}

CategoryDistribution read_distribution_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"category", "count", "proportion"}) {
    throw SchemaMismatch("distribution file " + path.string() +
                         " must start with header category,count,proportion");
  }
  CategoryDistribution dist;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3) {
      throw SchemaMismatch(path.string() + ": row " + std::to_string(i) + " is not three columns");
    }
    long count = 0;
    const auto& text = rows[i][1];
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), count);
    if (ec != std::errc() || ptr != text.data() + text.size() || count < 1) {
      throw SchemaMismatch(path.string() + ": bad count \"" + text + "\"");
    }
    if (!dist.counts.emplace(rows[i][0], count).second) {
      throw SchemaMismatch(path.string() + ": category \"" + rows[i][0] + "\" repeated");
    }
    dist.total_attributions += count;
  }
  // n_documents is not representable in this file format; callers that need
  // document-based measures must supply it separately.
  dist.n_documents = 0;
  return dist;
}

}  // namespace meshcite::analytics
