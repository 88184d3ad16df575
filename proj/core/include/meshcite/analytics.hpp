#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meshcite::analytics {

// Attribution counts per category over a document set. A document carrying k
// categories contributes k attributions, so total_attributions can exceed
// n_documents. Zero-count categories are never stored.
struct CategoryDistribution {
  std::map<std::string, long> counts;
  std::size_t n_documents = 0;
  long total_attributions = 0;

  friend bool operator==(const CategoryDistribution&, const CategoryDistribution&) = default;
};

CategoryDistribution wc_distribution(const std::vector<std::vector<std::string>>& per_record_categories);

// counts[core] / n_documents; 0.0 when the core category is absent. Throws
// DivisionByZero when the distribution covers no documents.
double core_share(const CategoryDistribution& dist, const std::string& core);

// Square similarity matrix over labeled categories. Entries lie in [0, 1],
// the diagonal is exactly 1, and the matrix is symmetric within 1e-9
// (validated on construction/load). Distances for the diversity measure are
// d_ij = 1 - s_ij.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // Takes row-major values of size labels.size()^2; validates.
  SimilarityMatrix(std::vector<std::string> labels, std::vector<double> values);

  // All-distinct matrix: 1 on the diagonal, 0 elsewhere.
  static SimilarityMatrix all_distinct(std::vector<std::string> labels);

  // CSV with labels in the first row and first column, numeric body.
  static SimilarityMatrix load_csv(const std::filesystem::path& path);
  void write_csv(const std::filesystem::path& path) const;

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * labels_.size() + j]; }
  std::optional<std::size_t> index_of(const std::string& label) const;

 private:
  void validate() const;

  std::vector<std::string> labels_;
  std::vector<double> values_;  // row-major
};

// Rao-Stirling diversity: sum over ordered pairs i != j of p_i p_j d_ij, with
// proportions p taken over attributions and d_ij = 1 - s_ij. Computed here
// through the algebraic identity delta = (sum p)^2 - p^T S p, which the test
// suite checks against a brute-force double sum. Result clamped to [0, 1].
// Throws EmptyDistribution or UnknownCategory.
double rao_stirling(const CategoryDistribution& dist, const SimilarityMatrix& sim);

struct RankSeries {
  std::vector<long> values;  // non-increasing
  long total = 0;
  std::size_t zeros = 0;

  friend bool operator==(const RankSeries&, const RankSeries&) = default;
};

// Ranks citation counts of matched records (absent values are excluded) in
// non-increasing order.
RankSeries citation_rank_series(const std::vector<std::optional<long>>& tc_values);

// Distribution CSV: "category,count,proportion", ordered by descending count
// then label; proportion = count / total_attributions.
void write_distribution_csv(const CategoryDistribution& dist, const std::filesystem::path& path);
CategoryDistribution read_distribution_csv(const std::filesystem::path& path);

// Deterministic presentation order: descending count, ties by label.
std::vector<std::pair<std::string, long>> ranked_counts(const CategoryDistribution& dist);

}  // namespace meshcite::analytics
