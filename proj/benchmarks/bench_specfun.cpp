#include <benchmark/benchmark.h>

#include "fracrk/specfun.hpp"

namespace {

void bm_ellip_k(benchmark::State& state) {
  double k = 0.999;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fracrk::specfun::ellip_k(k));
  }
}
BENCHMARK(bm_ellip_k);

void bm_ml_series(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fracrk::specfun::mittag_leffler_neg(0.75, 1.0, 0.8));
  }
}
BENCHMARK(bm_ml_series);

void bm_ml_contour(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fracrk::specfun::mittag_leffler_neg(0.75, 1.0, 4.0));
  }
}
BENCHMARK(bm_ml_contour);

void bm_ml_asymptotic(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fracrk::specfun::mittag_leffler_neg(0.75, 1.0, 2.0e5));
  }
}
BENCHMARK(bm_ml_asymptotic);

}  // namespace

BENCHMARK_MAIN();
