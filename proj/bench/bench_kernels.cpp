// Serial reference kernels against the OpenMP kernels on identical inputs.

#include <benchmark/benchmark.h>

#include <random>

#include "snowflake/kernels.hpp"

using namespace snowflake;

namespace {

PointSet random_set(std::size_t count, std::size_t dim, double p, std::size_t block = 1) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> g;
  PointSet s;
  s.dim = dim;
  s.p = p;
  s.block = block;
  s.coords.resize(count * dim);
  for (double& x : s.coords) x = g(gen);
  return s;
}

void BM_rademacher_serial(benchmark::State& state) {
  const PointSet v = random_set(static_cast<std::size_t>(state.range(0)), 8, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(serial::rademacher_moment_exact(v, 1.5));
}

void BM_rademacher_omp(benchmark::State& state) {
  const PointSet v = random_set(static_cast<std::size_t>(state.range(0)), 8, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::rademacher_moment_exact(v, 1.5));
}

void BM_hypercube_serial(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const PointSet v = random_set(std::size_t{1} << n, 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::hypercube_sums(v, n));
}

void BM_hypercube_omp(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const PointSet v = random_set(std::size_t{1} << n, 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::hypercube_sums(v, n));
}

void BM_cotype_serial(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const PointSet v = random_set(std::size_t{m} * m * m, 6, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::cotype_sums_exact(v, 3, m, 2.0));
}

void BM_cotype_omp(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const PointSet v = random_set(std::size_t{m} * m * m, 6, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cotype_sums_exact(v, 3, m, 2.0));
}

}  // namespace

BENCHMARK(BM_rademacher_serial)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_rademacher_omp)->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_hypercube_serial)->Arg(10)->Arg(14);
BENCHMARK(BM_hypercube_omp)->Arg(10)->Arg(14);
BENCHMARK(BM_cotype_serial)->Arg(8)->Arg(16);
BENCHMARK(BM_cotype_omp)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
