#include <benchmark/benchmark.h>

#include "crtbounds/bounds.hpp"
#include "crtbounds/itt.hpp"
#include "crtbounds/model.hpp"
#include "crtbounds/rng.hpp"
#include "crtbounds/sim.hpp"

namespace {

crtb::StudyData make_study(int j) {
  crtb::SimConfig cfg;
  cfg.j = j;
  cfg.m = j / 2;
  cfg.seed = 99;
  crtb::Rng pop_rng(cfg.seed, crtb::Stream::population);
  const crtb::Population pop = crtb::generate_population(cfg, pop_rng);
  crtb::Rng rand_rng(cfg.seed, crtb::Stream::randomization);
  return crtb::randomize(pop, cfg.m, rand_rng);
}

void BM_OverallItt(benchmark::State& state) {
  const crtb::StudyData data = make_study(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(crtb::estimate_overall_itt(data));
}
BENCHMARK(BM_OverallItt)->Arg(40)->Arg(151);

void BM_HeteroItt(benchmark::State& state) {
  const crtb::StudyData data = make_study(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        crtb::estimate_hetero_itt(data, crtb::CovariateSelector{}));
}
BENCHMARK(BM_HeteroItt)->Arg(40)->Arg(151);

void BM_BoundProgram(benchmark::State& state) {
  const crtb::StudyData data = make_study(151);
  crtb::PipelineConfig cfg;
  cfg.seed = 5;
  const crtb::BoundResults res = crtb::run_bound_pipeline(data, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(crtb::classifier_bounds(res.inputs));
}
BENCHMARK(BM_BoundProgram);

void BM_BoundPipeline(benchmark::State& state) {
  const crtb::StudyData data = make_study(static_cast<int>(state.range(0)));
  crtb::PipelineConfig cfg;
  cfg.seed = 5;
  for (auto _ : state)
    benchmark::DoNotOptimize(crtb::run_bound_pipeline(data, cfg));
}
BENCHMARK(BM_BoundPipeline)->Arg(40)->Arg(151);

}  // namespace

BENCHMARK_MAIN();
