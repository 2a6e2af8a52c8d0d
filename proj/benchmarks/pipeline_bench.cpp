#include <benchmark/benchmark.h>

#include "agsynth/generation.hpp"
#include "agsynth/image.hpp"
#include "agsynth/image_io.hpp"
#include "agsynth/stub_backend.hpp"

namespace {

using namespace agsynth;

RgbImage stub_image(int side) {
  StubBackend stub(1);
  return stub.generate(make_text_job("apples in the field for harvesting", 1, side, stub.id()))[0];
}

void BM_StubTextToImage(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  StubBackend stub(1);
  auto job = make_text_job("mangoes in the field for harvesting", 1, side, stub.id());
  for (auto _ : state) benchmark::DoNotOptimize(stub.generate(job));
}
BENCHMARK(BM_StubTextToImage)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_StubVariation(benchmark::State& state) {
  StubBackend stub(1);
  auto job = make_variation_job(stub_image(512), 1, 1024, stub.id());
  for (auto _ : state) benchmark::DoNotOptimize(stub.generate(job));
}
BENCHMARK(BM_StubVariation)->Unit(benchmark::kMillisecond);

void BM_PreprocessForMetrics(benchmark::State& state) {
  RgbImage img = stub_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_for_metrics(img));
}
BENCHMARK(BM_PreprocessForMetrics)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EncodePng(benchmark::State& state) {
  RgbImage img = stub_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode_png(img));
}
BENCHMARK(BM_EncodePng)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_DecodePng(benchmark::State& state) {
  auto bytes = encode_png(stub_image(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(decode_image(bytes, "bench"));
}
BENCHMARK(BM_DecodePng)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_CacheKey(benchmark::State& state) {
  auto job = make_variation_job(stub_image(1024), 4, 1024, "stub:1");
  for (auto _ : state) benchmark::DoNotOptimize(cache_key(job));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(job.source_image.size()));
}
BENCHMARK(BM_CacheKey)->Unit(benchmark::kMicrosecond);

}  // namespace
