#include <benchmark/benchmark.h>

#include "agsynth/canny.hpp"
#include "agsynth/filter.hpp"
#include "agsynth/gabor.hpp"
#include "agsynth/metrics.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace agsynth;

ImagePlane scene(int side, std::uint64_t seed) {
  auto g = fixtures::natural(side, side, seed);
  return ImagePlane(g.width, g.height, g.v);
}

void BM_Mse(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  ImagePlane a = scene(side, 1), b = scene(side, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mse(a, b));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Mse)->Arg(256)->Arg(1024);

void BM_Fsim(benchmark::State& state) {
  ImagePlane a = scene(256, 1), b = scene(256, 2);
  FsimConfig cfg;
  cfg.scales = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fsim(a, b, cfg));
}
BENCHMARK(BM_Fsim)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Canny(benchmark::State& state) {
  ImagePlane a = scene(static_cast<int>(state.range(0)), 1);
  FsimConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(canny_edges(a, cfg));
}
BENCHMARK(BM_Canny)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GaborResponses(benchmark::State& state) {
  ImagePlane a = scene(static_cast<int>(state.range(0)), 1);
  GaborBank bank = build_gabor_bank(FsimConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(gabor_responses(a, bank));
}
BENCHMARK(BM_GaborResponses)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CorrelateSeparable(benchmark::State& state) {
  ImagePlane a = scene(256, 1);
  const int radius = static_cast<int>(state.range(0));
  auto taps = gaussian_taps(radius / 3.0, radius);
  for (auto _ : state)
    benchmark::DoNotOptimize(correlate_separable(a.values(), a.width(), a.height(), taps));
}
BENCHMARK(BM_CorrelateSeparable)->Arg(3)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_CorrelateDense(benchmark::State& state) {
  ImagePlane a = scene(256, 1);
  const int radius = static_cast<int>(state.range(0));
  auto taps = gaussian_taps(radius / 3.0, radius);
  const int k = 2 * radius + 1;
  std::vector<double> kernel(static_cast<std::size_t>(k) * k);
  for (int y = 0; y < k; ++y)
    for (int x = 0; x < k; ++x) kernel[static_cast<std::size_t>(y) * k + x] = taps[y] * taps[x];
  for (auto _ : state)
    benchmark::DoNotOptimize(correlate_dense(a.values(), a.width(), a.height(), kernel, k));
}
BENCHMARK(BM_CorrelateDense)->Arg(3)->Arg(7)->Unit(benchmark::kMicrosecond);

}  // namespace
