// Microbenchmarks for the hot paths: the optical injection, the fixed-point
// solve, and one training-epoch evaluation. Run with --benchmark_filter=...
// to pick individual cases.

#include <benchmark/benchmark.h>

#include "prc/harness.hpp"
#include "prc/pipeline.hpp"
#include "prc/seeds.hpp"

namespace {

prc::PipelineConfig default_pipeline_config() {
  prc::ExperimentConfig cfg = prc::default_config();
  prc::NamedSeeds s = cfg.seeds();
  prc::PipelineConfig pc;
  pc.encoder = cfg.encoder;
  pc.modes = cfg.modes;
  pc.reservoir = cfg.reservoir;
  pc.reservoir.seed = s.coupling;
  pc.fiber_seed = s.fiber;
  pc.imaging_seed = s.imaging;
  return pc;
}

const prc::Pipeline& shared_pipeline() {
  static prc::Pipeline p = prc::Pipeline::build(default_pipeline_config());
  return p;
}

void BM_Inject(benchmark::State& state) {
  prc::PipelineConfig pc = default_pipeline_config();
  const prc::Pipeline& pipe = shared_pipeline();
  prc::BooleanImage ring = prc::make_dc_ring(pc.encoder);
  prc::BooleanImage pattern =
      prc::compose_input(ring, prc::encode_digit(3, pc.encoder));
  std::vector<double> illum = prc::illumination_profile(pc.encoder);
  for (auto _ : state) {
    prc::ComplexInjection inj =
        prc::inject(pattern, illum, pipe.fiber(), pipe.imaging());
    benchmark::DoNotOptimize(inj.e);
  }
}
BENCHMARK(BM_Inject);

void BM_SteadyState(benchmark::State& state) {
  prc::PipelineConfig pc = default_pipeline_config();
  const prc::Pipeline& pipe = shared_pipeline();
  prc::BooleanImage ring = prc::make_dc_ring(pc.encoder);
  prc::BooleanImage pattern =
      prc::compose_input(ring, prc::encode_digit(3, pc.encoder));
  std::vector<double> illum = prc::illumination_profile(pc.encoder);
  prc::ComplexInjection inj =
      prc::inject(pattern, illum, pipe.fiber(), pipe.imaging());
  for (auto _ : state) {
    prc::ReservoirState s = prc::steady_state(inj, pc.reservoir, pipe.coupling());
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_SteadyState);

void BM_TrainingEpochFresh(benchmark::State& state) {
  prc::ExperimentConfig cfg = prc::default_config();
  prc::NamedSeeds s = cfg.seeds();
  const prc::Pipeline& pipe = shared_pipeline();
  prc::BatchEvaluator ev = prc::make_training_evaluator(
      pipe, cfg.effective_task(), cfg.trainer.batch_size, s.batch_train,
      s.noise_train, /*frozen_noise=*/false, /*resample_batch=*/false);
  prc::RandomStream rng(1);
  prc::ReadoutWeights w = prc::ReadoutWeights::random(pipe.n_nodes(), rng);
  int epoch = 0;
  for (auto _ : state) {
    prc::BatchEval b = ev(w, ++epoch);
    benchmark::DoNotOptimize(b.eps);
  }
}
BENCHMARK(BM_TrainingEpochFresh);

void BM_TrainingEpochFrozen(benchmark::State& state) {
  prc::ExperimentConfig cfg = prc::default_config();
  prc::NamedSeeds s = cfg.seeds();
  const prc::Pipeline& pipe = shared_pipeline();
  prc::BatchEvaluator ev = prc::make_training_evaluator(
      pipe, cfg.effective_task(), cfg.trainer.batch_size, s.batch_train,
      s.noise_train, /*frozen_noise=*/true, /*resample_batch=*/false);
  prc::RandomStream rng(1);
  prc::ReadoutWeights w = prc::ReadoutWeights::random(pipe.n_nodes(), rng);
  int epoch = 0;
  for (auto _ : state) {
    prc::BatchEval b = ev(w, ++epoch);
    benchmark::DoNotOptimize(b.eps);
  }
}
BENCHMARK(BM_TrainingEpochFrozen);

}  // namespace

BENCHMARK_MAIN();
