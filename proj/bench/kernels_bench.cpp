#include <benchmark/benchmark.h>

#include <random>

#include "dynareg/kernels.hpp"

using namespace dynareg;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

std::vector<kernels::SketchEntry> random_entries(std::size_t n, std::size_t q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<kernels::SketchEntry> e(n);
  for (auto& x : e) x = {static_cast<std::uint32_t>(rng() % q), static_cast<std::int8_t>(rng() % 2 ? 1 : -1)};
  return e;
}

template <void (*Gemm)(const DenseMatrix&, const DenseMatrix&, DenseMatrix&)>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix a = random_matrix(n, n, 1), b = random_matrix(n, 8, 2);
  DenseMatrix c(n, 8);
  for (auto _ : state) {
    Gemm(a, b, c);
    benchmark::DoNotOptimize(c.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * 8));
}

template <void (*Fwht)(DenseMatrix&)>
void BM_Fwht(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  DenseMatrix a = random_matrix(n, 4, 3);
  for (auto _ : state) {
    Fwht(a);
    benchmark::DoNotOptimize(a.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 4));
}

template <void (*Apply)(std::span<const kernels::SketchEntry>, const DenseMatrix&, DenseMatrix&)>
void BM_CountSketch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix m = random_matrix(n, 4, 4);
  const auto entries = random_entries(n, 64, 5);
  DenseMatrix out(64, 4);
  for (auto _ : state) {
    Apply(entries, m, out);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 4));
}

}  // namespace

BENCHMARK(BM_Gemm<kernels::serial::gemm>)->Name("gemm/serial")->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Gemm<kernels::parallel::gemm>)->Name("gemm/parallel")->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Fwht<kernels::serial::fwht_columns>)->Name("fwht/serial")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_Fwht<kernels::parallel::fwht_columns>)->Name("fwht/parallel")->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(BM_CountSketch<kernels::serial::countsketch_apply>)
    ->Name("countsketch/serial")
    ->RangeMultiplier(8)
    ->Range(1 << 10, 1 << 19);
BENCHMARK(BM_CountSketch<kernels::parallel::countsketch_apply>)
    ->Name("countsketch/parallel")
    ->RangeMultiplier(8)
    ->Range(1 << 10, 1 << 19);

BENCHMARK_MAIN();
