#include <benchmark/benchmark.h>

#include "fraclab/commands.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/verifier.hpp"

using namespace fraclab;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) ? "parallel x" + std::to_string(max_threads()) : "serial");
}

void BM_OracleGrid(benchmark::State& state) {
  const FieldPtr u = anisotropic_bump(Point::Zero(3), Eigen::Vector3d(1, 2, 5).asDiagonal().toDenseMatrix());
  const FracParams p{0.6, 2, 3};
  for (auto _ : state)
    benchmark::DoNotOptimize(brute_force_oracle(*u, Point::Zero(3), p, 6.0, OperatorKind::Truncated, {}, mode(state)));
  label(state);
}

void BM_OptimizerRestarts(benchmark::State& state) {
  const FieldPtr u = anisotropic_bump(Point::Zero(3), Eigen::Vector3d(1, 2, 5).asDiagonal().toDenseMatrix());
  OptimizerConfig opt;
  opt.restarts = 8;
  opt.exec = mode(state);
  const Point x = Eigen::Vector3d(0.1, -0.2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(eval_truncated(*u, x, {0.6, 2, 3}, {}, opt));
  label(state);
}

void BM_VerifierSamples(benchmark::State& state) {
  const Scene sc = fixture_scene("two-balls-r3");
  const auto pts = halton_points(3, 24, {Eigen::Vector3d(-2, -2, -2), Eigen::Vector3d(2, 6, 2)});
  VerifierConfig cfg;
  cfg.exec = mode(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_distance_supersolution(sc.set, 2, pts, 0.5, WitnessMode::Frames, false, cfg));
  label(state);
}

}  // namespace

BENCHMARK(BM_OracleGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizerRestarts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifierSamples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
