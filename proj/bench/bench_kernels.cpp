// Serial reference vs OpenMP kernels over common frame sizes. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "camscout/fixture.hpp"
#include "camscout/identifier.hpp"
#include "camscout/image.hpp"
#include "camscout/kernels.hpp"

namespace {

using camscout::kernels::kParallelThreshold;
namespace serial = camscout::kernels::serial;
namespace parallel = camscout::kernels::parallel;

std::vector<std::uint8_t> noise(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  std::vector<std::uint8_t> out(n);
  for (auto& p : out) p = static_cast<std::uint8_t>(px(rng));
  return out;
}

template <std::size_t (*Kernel)(std::span<const std::uint8_t>, std::span<const std::uint8_t>)>
void BM_CountChanged(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 1), b = noise(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n));
}

template <std::uint64_t (*Kernel)(std::span<const std::uint8_t>)>
void BM_Sum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

// 320x240, just past the fork threshold, 1280x720, 1920x1080
void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {320L * 240, static_cast<long>(kParallelThreshold) * 2, 1280L * 720, 1920L * 1080}) b->Arg(n);
}

// Whole-frameset classification including decode, same shape as the
// acceptance benchmark.
void BM_Classify(benchmark::State& state) {
  const auto sets = camscout::synthetic_framesets(25);
  camscout::MethodConfig cfg;
  cfg.method = static_cast<camscout::Method>(state.range(0));
  for (auto _ : state)
    for (const auto& fs : sets) benchmark::DoNotOptimize(camscout::classify(fs, cfg));
  state.SetLabel(std::string(camscout::to_string(cfg.method)));
}

}  // namespace

BENCHMARK(BM_CountChanged<serial::count_changed>)->Apply(sizes);
BENCHMARK(BM_CountChanged<parallel::count_changed>)->Apply(sizes);
BENCHMARK(BM_Sum<serial::sum>)->Apply(sizes);
BENCHMARK(BM_Sum<parallel::sum>)->Apply(sizes);
BENCHMARK(BM_Classify)
    ->Arg(static_cast<int>(camscout::Method::Checksum))
    ->Arg(static_cast<int>(camscout::Method::PercentDiff))
    ->Arg(static_cast<int>(camscout::Method::LuminanceDiff));

BENCHMARK_MAIN();
