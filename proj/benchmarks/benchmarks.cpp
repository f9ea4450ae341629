#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "delan/baselines.hpp"
#include "delan/model.hpp"
#include "delan/robot.hpp"

namespace {

using namespace delan;

JointState random_state(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  JointState s;
  s.q.resize(n);
  s.qdot.resize(n);
  s.qddot.resize(n);
  for (int i = 0; i < n; ++i) {
    s.q[i] = dist(rng);
    s.qdot[i] = dist(rng);
    s.qddot[i] = dist(rng);
  }
  return s;
}

void BM_InverseDynamics(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DelanConfig cfg;
  cfg.n = n;
  const DelanParams params = DelanParams::init(cfg, 1);
  std::mt19937_64 rng(2);
  const JointState s = random_state(n, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(inverse_dynamics(params, s));
}
BENCHMARK(BM_InverseDynamics)->Arg(2)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_ForwardDynamics(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DelanConfig cfg;
  cfg.n = n;
  const DelanParams params = DelanParams::init(cfg, 1);
  std::mt19937_64 rng(3);
  const JointState s = random_state(n, rng);
  const Vec tau = s.qddot;
  for (auto _ : state)
    benchmark::DoNotOptimize(forward_dynamics(params, s.q, s.qdot, tau));
}
BENCHMARK(BM_ForwardDynamics)->Arg(2)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_OracleInverseDynamics(benchmark::State& state) {
  const RobotParams plant;
  std::mt19937_64 rng(4);
  const JointState s = random_state(2, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle_inverse_dynamics(plant, s));
}
BENCHMARK(BM_OracleInverseDynamics)->Unit(benchmark::kNanosecond);

void BM_TrainStep(benchmark::State& state) {
  const int batch_size = static_cast<int>(state.range(0));
  DelanConfig cfg;
  DelanTrainer trainer(DelanParams::init(cfg, 5), 1e-4);
  std::mt19937_64 rng(6);
  const RobotParams plant;
  std::vector<DynSample> batch;
  for (int i = 0; i < batch_size; ++i) {
    DynSample sample;
    sample.state = random_state(2, rng);
    sample.tau = oracle_inverse_dynamics(plant, sample.state);
    batch.push_back(sample);
  }
  trainer.train_step(batch);  // tape construction outside the timed loop
  for (auto _ : state)
    benchmark::DoNotOptimize(trainer.train_step(batch));
}
BENCHMARK(BM_TrainStep)->Arg(1)->Arg(32)->Arg(64)
    ->Unit(benchmark::kMillisecond);

void BM_PlantStep(benchmark::State& state) {
  const RobotParams plant;
  std::mt19937_64 rng(7);
  const JointState s = random_state(2, rng);
  const Vec tau = s.qddot;
  for (auto _ : state)
    benchmark::DoNotOptimize(step(plant, s.q, s.qdot, tau, 1e-3));
}
BENCHMARK(BM_PlantStep)->Unit(benchmark::kNanosecond);

}  // namespace

BENCHMARK_MAIN();
