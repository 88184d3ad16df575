#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "meshcite/crosswalk.hpp"

namespace {

std::vector<std::string> random_uts(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> digit(0, 9);
  std::vector<std::string> uts;
  uts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string ut(15, '0');
    for (auto& c : ut) {
      c = static_cast<char>('0' + digit(rng));
    }
    uts.push_back(std::move(ut));
  }
  return uts;
}

void BM_generate_ut_queries(benchmark::State& state) {
  auto uts = random_uts(static_cast<std::size_t>(state.range(0)), 11);
  for (auto _ : state) {
    auto result = meshcite::crosswalk::generate_ut_queries(uts);
    benchmark::DoNotOptimize(result.batch.queries.size());
  }
}
BENCHMARK(BM_generate_ut_queries)->Arg(235)->Arg(10000);

}  // namespace
