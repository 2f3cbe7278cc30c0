// Serial reference against the OpenMP kernels for generation and rendering.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "ravenforge/corpus.hpp"
#include "ravenforge/render.hpp"

using namespace ravenforge;

namespace {

std::vector<InstanceSpec> specs(std::int64_t n) {
  return plan_instances(plan_splits(n, std::vector<Configuration>(kConfigurations.begin(), kConfigurations.end())), 1);
}

void BM_GenerateSerial(benchmark::State& state) {
  const auto s = specs(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_batch_serial(RegimeSpec::mesh(), s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GenerateParallel(benchmark::State& state) {
  const auto s = specs(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_batch(RegimeSpec::mesh(), s, {}, omp_get_max_threads()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<SymbolicMatrix> matrices(std::int64_t n) {
  std::vector<SymbolicMatrix> out;
  for (const auto& s : specs(n)) out.push_back(generate_matrix(RegimeSpec::mesh(), s).matrix);
  return out;
}

void BM_RenderSerial(benchmark::State& state) {
  const auto ms = matrices(state.range(0));
  for (auto _ : state)
    for (const auto& m : ms) benchmark::DoNotOptimize(render_matrix(m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RenderParallel(benchmark::State& state) {
  const auto ms = matrices(state.range(0));
  std::vector<std::array<PanelImage, 16>> out(ms.size());
  for (auto _ : state) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ms.size()); ++i)
      out[static_cast<std::size_t>(i)] = render_matrix(ms[static_cast<std::size_t>(i)]);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_GenerateSerial)->Arg(70)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateParallel)->Arg(70)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderSerial)->Arg(70)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderParallel)->Arg(70)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
