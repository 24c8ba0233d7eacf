#include <benchmark/benchmark.h>

#include <stdexcept>

#include "gyrstab/gyration.hpp"
#include "gyrstab/normalize.hpp"
#include "gyrstab/reldb.hpp"

using namespace gyrstab;

namespace {

const Database& db() {
  static const Database d = [] {
    ParseResult r = load_database(GYRSTAB_BENCH_DATA_DIR);
    if (!r.ok()) throw std::runtime_error(r.errors.front().to_string());
    return std::move(r.db);
  }();
  return d;
}

void BM_LoadAndValidate(benchmark::State& st) {
  for (auto _ : st) {
    ParseResult r = load_database(GYRSTAB_BENCH_DATA_DIR);
    benchmark::DoNotOptimize(validate(r.db));
  }
}
BENCHMARK(BM_LoadAndValidate)->Unit(benchmark::kMillisecond);

void BM_Normalize(benchmark::State& st) {
  Expr e = parse_expr("eta(4).nu(5) + wh(iota(4), iota(4)).eta(7) + 3*nu(4).eta(7)");
  ParameterAssignment a = default_assignment(db());
  for (auto _ : st) benchmark::DoNotOptimize(normalize(e, db(), a));
}
BENCHMARK(BM_Normalize);

void BM_Classify(benchmark::State& st) {
  Plane p = static_cast<Plane>(st.range(0));
  int k = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(classify(p, k, db()));
}
BENCHMARK(BM_Classify)
    ->Args({static_cast<int>(Plane::H), 4})
    ->Args({static_cast<int>(Plane::O), 4})
    ->Args({static_cast<int>(Plane::O), 12})
    ->Unit(benchmark::kMillisecond);

void BM_Table(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(table(db()));
}
BENCHMARK(BM_Table)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
