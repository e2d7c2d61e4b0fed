#include <benchmark/benchmark.h>

#include "pednav/ekf.hpp"
#include "pednav/factor_graph.hpp"
#include "pednav/optimizer.hpp"
#include "pednav/pipeline.hpp"
#include "pednav/preintegration.hpp"

using namespace pednav;

namespace {

const TrajectoryDataset& dataset() {
  static const TrajectoryDataset ds = [] {
    PipelineConfig cfg;
    cfg.sim.gait.duration = 20.0;
    return simulate_dataset(cfg.sim);
  }();
  return ds;
}

void BM_IntegrateSample(benchmark::State& state) {
  const auto& imu = dataset().imu_of(Foot::kRight);
  const ImuNoiseModel noise;
  const double dt = 1.0 / dataset().imu_rate;
  std::size_t i = 0;
  PreintegratedImu acc;
  for (auto _ : state) {
    acc = integrate_sample(acc, imu[i], dt, noise);
    if (++i == imu.size()) {
      i = 0;
      acc = PreintegratedImu{};
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_IntegrateSample);

void BM_EkfPredict(benchmark::State& state) {
  const auto& ds = dataset();
  const ImuNoiseModel noise;
  const double dt = 1.0 / ds.imu_rate;
  const EkfState s0 = initial_estimate(ds, PriorSigmas{});
  EkfState s = s0;
  std::size_t i = 0;
  for (auto _ : state) {
    s = ekf_predict(s, ds.imu[0][i], ds.imu[1][i], dt, noise);
    if (++i == ds.samples()) {
      i = 0;
      s = s0;
    }
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_EkfPredict);

void BM_WindowOptimize(benchmark::State& state) {
  const auto& ds = dataset();
  PipelineConfig cfg;
  const GraphSettings s = method_settings(cfg, Method::kFgoZuptPosStep);
  const KeyframeSchedule schedule = make_schedule(ds, s, stance_flags(ds, s));
  const int last = std::min(static_cast<int>(state.range(0)), static_cast<int>(schedule.size())) - 1;
  const EkfState init = initial_estimate(ds, cfg.prior);
  const PriorFactor prior = PriorFactor::from_covariance(0, init.x, init.P);
  const BuiltGraph built = build_graph(ds, schedule, s, 0, last, prior);
  for (auto _ : state) {
    OptimizeResult r = optimize(built.graph, built.values, cfg.solver);
    benchmark::DoNotOptimize(r);
  }
  state.SetLabel(std::to_string(last + 1) + " nodes");
}
BENCHMARK(BM_WindowOptimize)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
