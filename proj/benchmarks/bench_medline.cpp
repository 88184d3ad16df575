#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "meshcite/medline.hpp"
#include "meshcite/tables.hpp"

namespace {

std::string load_fixture() {
  std::ifstream in(std::string(MESHCITE_DATA_DIR) + "/brugada/medline.txt", std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void BM_parse_medline(benchmark::State& state) {
  std::string text = load_fixture();
  for (auto _ : state) {
    auto result = meshcite::medline::parse_medline_text(text);
    benchmark::DoNotOptimize(result.records.size());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_parse_medline);

void BM_build_tables(benchmark::State& state) {
  auto records = meshcite::medline::parse_medline_text(load_fixture()).records;
  for (auto _ : state) {
    auto tables = meshcite::tables::build_tables(records);
    benchmark::DoNotOptimize(tables.ti.size());
  }
}
BENCHMARK(BM_build_tables);

}  // namespace
