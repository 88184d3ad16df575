#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "meshcite/analytics.hpp"

namespace {

using meshcite::analytics::CategoryDistribution;
using meshcite::analytics::SimilarityMatrix;

SimilarityMatrix random_matrix(std::size_t n, std::mt19937& rng) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("C" + std::to_string(i));
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = uniform(rng);
      values[i * n + j] = s;
      values[j * n + i] = s;
    }
  }
  return SimilarityMatrix(std::move(labels), std::move(values));
}

void BM_rao_stirling(benchmark::State& state) {
  std::mt19937 rng(7);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  auto sim = random_matrix(n, rng);
  CategoryDistribution dist;
  std::uniform_int_distribution<long> count(1, 200);
  for (std::size_t i = 0; i < n; ++i) {
    long c = count(rng);
    dist.counts["C" + std::to_string(i)] = c;
    dist.total_attributions += c;
  }
  dist.n_documents = 235;
  for (auto _ : state) {
    benchmark::DoNotOptimize(meshcite::analytics::rao_stirling(dist, sim));
  }
}
BENCHMARK(BM_rao_stirling)->Arg(24)->Arg(256);

}  // namespace
