#include "fsik/benchmark.hpp"
#include "fsik/fabrik.hpp"
#include "fsik/solver.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace fsik;

void BM_ForwardKinematics(benchmark::State& state) {
  const RobotModel model = builtin_model(state.range(0) == 0 ? RobotKind::UR5 : RobotKind::KUKA);
  const JointVector theta = JointVector::Constant(model.dof(), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(forward_kinematics(model, theta));
}
BENCHMARK(BM_ForwardKinematics)->Arg(0)->Arg(1);

void BM_FabrikSweep(benchmark::State& state) {
  fabrik::ChainState chain;
  chain.base_direction = Vec3::UnitZ();
  chain.positions = {Vec3(0, 0, 0), Vec3(0, 0.05, 0.42), Vec3(0, 0.1, 0.82)};
  chain.link_lengths = {(chain.positions[1] - chain.positions[0]).norm(),
                        (chain.positions[2] - chain.positions[1]).norm()};
  chain.joints = {fabrik::JointSpec::ball(kPi), fabrik::JointSpec::ball(kPi)};
  const Vec3 target(0.3, 0.2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(fabrik::backward_phase(fabrik::forward_phase(chain, target)));
}
BENCHMARK(BM_FabrikSweep);

void BM_Solve(benchmark::State& state) {
  const RobotModel model = builtin_model(state.range(0) == 0 ? RobotKind::UR5 : RobotKind::KUKA);
  SolverConfig config = SolverConfig::defaults_for(model.kind);
  if (state.range(1) == 1) config.mode = SolveMode::FabrikOnly;
  const bench::QuerySet qs = bench::generate_queries(model, 256, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = qs.queries[i++ % qs.queries.size()];
    benchmark::DoNotOptimize(solve(model, IKQuery{q.t_des, q.theta_init}, config));
  }
}
BENCHMARK(BM_Solve)->Args({0, 0})->Args({0, 1})->Args({1, 0})->Args({1, 1})->Unit(benchmark::kMicrosecond);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
