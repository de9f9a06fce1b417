// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include "pobs/canonical.hpp"
#include "pobs/parallel.hpp"
#include "pobs/random.hpp"

namespace {

std::vector<pobs::Matrix> projectors(pobs::Index d) {
  auto rng = pobs::rnd::stream(1, static_cast<std::uint64_t>(d));
  const pobs::Matrix v = pobs::rnd::unitary(d, rng);
  std::vector<pobs::Matrix> out;
  for (pobs::Index k = 0; k < d; ++k) out.emplace_back(v.col(k) * v.col(k).adjoint());
  return out;
}

void BM_Exclusivity(benchmark::State& state) {
  const auto bases = pobs::par::range_bases(projectors(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pobs::par::max_cross_overlap(bases));
}

void BM_ExclusivitySerial(benchmark::State& state) {
  const auto bases = pobs::par::range_bases_serial(projectors(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pobs::par::max_cross_overlap_serial(bases));
}

void BM_ConjugateAll(benchmark::State& state) {
  const auto ops = projectors(state.range(0));
  auto rng = pobs::rnd::stream(2);
  const pobs::Matrix u = pobs::rnd::unitary(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(pobs::par::conjugate_all(u, ops));
}

void BM_ConjugateAllSerial(benchmark::State& state) {
  const auto ops = projectors(state.range(0));
  auto rng = pobs::rnd::stream(2);
  const pobs::Matrix u = pobs::rnd::unitary(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(pobs::par::conjugate_all_serial(u, ops));
}

void BM_LimitProbe(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pobs::commutator_limit_probe({8, 16, 32}));
}

void BM_LimitProbeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pobs::commutator_limit_probe_serial({8, 16, 32}));
}

}  // namespace

BENCHMARK(BM_Exclusivity)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_ExclusivitySerial)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_ConjugateAll)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_ConjugateAllSerial)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_LimitProbe)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LimitProbeSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
