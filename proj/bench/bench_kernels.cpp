// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "hdt/pair.hpp"
#include "hdt/protocol.hpp"
#include "hdt/residue.hpp"
#include "hdt/rng.hpp"

namespace {

using namespace hdt;

ResidueMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  ResidueMatrix m(6, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, static_cast<Residue>(rng.below(6)));
  return m;
}

ResidueVector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ResidueVector v(6, n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, static_cast<Residue>(rng.below(6)));
  return v;
}

Bits random_bits(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Bits x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng.below(2));
  return x;
}

void BM_VecMat_Parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_matrix(n, n, 1);
  const auto x = random_vector(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(vec_mat_mul(x, m));
}

void BM_VecMat_Reference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_matrix(n, n, 1);
  const auto x = random_vector(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::vec_mat_mul(x, m));
}

void BM_MatMatT_Parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 3);
  const auto b = random_matrix(n, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(mat_mat_mul_transposed(a, b));
}

void BM_MatMatT_Reference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 3);
  const auto b = random_matrix(n, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(reference::mat_mat_mul_transposed(a, b));
}

void BM_Round_Incremental(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pair = identity_pair(n);
  const auto x = random_bits(n, 5);
  RoundOptions o;
  o.record = false;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_round(x, pair, Variant::subtractive, ++seed, o));
}

void BM_Round_Reference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pair = identity_pair(n);
  const auto x = random_bits(n, 5);
  RoundOptions o;
  o.record = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::run_round(x, pair, Variant::subtractive, ++seed, o));
  }
}

}  // namespace

BENCHMARK(BM_VecMat_Parallel)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_VecMat_Reference)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_MatMatT_Parallel)->RangeMultiplier(2)->Range(32, 512);
BENCHMARK(BM_MatMatT_Reference)->RangeMultiplier(2)->Range(32, 512);
BENCHMARK(BM_Round_Incremental)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Round_Reference)->RangeMultiplier(4)->Range(16, 256);

BENCHMARK_MAIN();
