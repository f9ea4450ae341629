#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "delan/baselines.hpp"
#include "delan/robot.hpp"
#include "test_util.hpp"

using namespace delan;
using test::random_vec;

namespace {

JointState random_state(std::mt19937_64& rng, double scale = 2.0) {
  return {random_vec(2, rng, scale), random_vec(2, rng, scale),
          random_vec(2, rng, scale)};
}

std::vector<DynSample> oracle_batch(const RobotParams& plant, int count,
                                    std::mt19937_64& rng) {
  std::vector<DynSample> batch;
  for (int i = 0; i < count; ++i) {
    DynSample s;
    s.state = random_state(rng);
    s.tau = oracle_inverse_dynamics(plant, s.state);
    batch.push_back(s);
  }
  return batch;
}

template <typename Fn>
void for_each_ffnn_param(FfnnParams& p, Fn&& fn) {
  for (auto& layer : p.layers) {
    fn(layer.W);
    fn(layer.b);
  }
}

}  // namespace

TEST_CASE("feed-forward network with zero weights outputs the final bias") {
  FfnnConfig cfg;
  FfnnParams params = FfnnParams::init(cfg, 1);
  for_each_ffnn_param(params, [](auto& m) { m.setZero(); });
  params.layers.back().b << 1.5, -2.5;
  std::mt19937_64 rng(3);
  const Vec out = ffnn_predict(params, random_state(rng));
  CHECK(out[0] == 1.5);
  CHECK(out[1] == -2.5);
}

TEST_CASE("feed-forward parameter count") {
  FfnnConfig cfg;  // input 3n = 6, hidden {64, 64}, output n = 2
  const FfnnParams params = FfnnParams::init(cfg, 0);
  const int expected = (6 * 64 + 64) + (64 * 64 + 64) + (64 * 2 + 2);
  CHECK(params.parameter_count() == expected);
}

TEST_CASE("matched capacity of the two learned models") {
  const DelanParams delan = DelanParams::init(DelanConfig{}, 0);
  const FfnnParams ffnn = FfnnParams::init(FfnnConfig{}, 0);
  const double ratio = static_cast<double>(ffnn.parameter_count()) /
                       static_cast<double>(delan.parameter_count());
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("feed-forward loss gradient matches finite differences") {
  FfnnConfig cfg;
  cfg.hidden = {8, 8};
  FfnnParams params = FfnnParams::init(cfg, 5);
  std::mt19937_64 rng(7);
  const RobotParams plant;
  const auto batch = oracle_batch(plant, 4, rng);
  const double lambda = 1e-4;
  const auto [loss, grads] = ffnn_loss_and_gradient(params, batch, lambda);
  (void)loss;

  const double h = 1e-6;
  std::size_t g = 0;
  double max_err = 0.0;
  for_each_ffnn_param(params, [&](auto& m) {
    REQUIRE(g < grads.size());
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const double orig = m.data()[k];
      m.data()[k] = orig + h;
      const double lp = ffnn_loss_and_gradient(params, batch, lambda).first;
      m.data()[k] = orig - h;
      const double lm = ffnn_loss_and_gradient(params, batch, lambda).first;
      m.data()[k] = orig;
      max_err = std::max(
          max_err, test::rel_err(grads[g].data()[k], (lp - lm) / (2.0 * h)));
    }
    ++g;
  });
  CHECK(g == grads.size());
  CHECK(max_err < 1e-5);
}

TEST_CASE("feed-forward training reduces the loss on a fixed batch") {
  FfnnConfig cfg;
  cfg.hidden = {16, 16};
  FfnnTrainer trainer(FfnnParams::init(cfg, 9), 0.0);
  std::mt19937_64 rng(11);
  const RobotParams plant;
  const auto batch = oracle_batch(plant, 16, rng);
  const double before = trainer.loss(batch);
  for (int i = 0; i < 200; ++i) trainer.train_step(batch);
  CHECK(trainer.loss(batch) < 0.5 * before);
}

TEST_CASE("regressor times the true base parameters is the exact torque") {
  std::mt19937_64 rng(13);
  std::vector<RobotParams> plants;
  plants.push_back(RobotParams{});
  plants.push_back(RobotParams::point_masses(1.0, 1.0, 1.0, 1.0));
  RobotParams heavy;
  heavy.m1 = 2.3;
  heavy.m2 = 0.7;
  heavy.lc1 = 0.1;
  heavy.lc2 = 0.4;
  heavy.I1 = 0.05;
  heavy.I2 = 0.01;
  plants.push_back(heavy);

  for (const auto& plant : plants) {
    const Vec beta = si_true_beta(plant);
    REQUIRE(beta.size() == kSiFeatureDim);
    for (int trial = 0; trial < 100; ++trial) {
      const JointState s = random_state(rng, 3.0);
      const Vec tau = oracle_inverse_dynamics(plant, s);
      const Vec fit = si_features(plant, s) * beta;
      CHECK((tau - fit).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("least squares recovers the base parameters from clean data") {
  const RobotParams plant;
  std::mt19937_64 rng(17);
  const auto samples = oracle_batch(plant, 50, rng);
  const SiModel model = si_fit(plant, samples);
  CHECK(model.rank == kSiFeatureDim);
  CHECK((model.beta - si_true_beta(plant)).cwiseAbs().maxCoeff() < 1e-8);

  for (int trial = 0; trial < 20; ++trial) {
    const JointState s = random_state(rng, 3.0);
    const Vec tau = oracle_inverse_dynamics(plant, s);
    CHECK((si_predict(plant, model, s) - tau).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rank-deficient data yields the minimum-norm fit") {
  const RobotParams plant;
  // static poses excite only the gravity columns, so the stack is deficient
  std::mt19937_64 rng(19);
  std::vector<DynSample> samples;
  for (int i = 0; i < 30; ++i) {
    DynSample s;
    s.state = {random_vec(2, rng, 2.0), Vec::Zero(2), Vec::Zero(2)};
    s.tau = oracle_inverse_dynamics(plant, s.state);
    samples.push_back(s);
  }
  const SiModel model = si_fit(plant, samples);
  CHECK(model.rank < kSiFeatureDim);
  // still consistent with the training data
  for (const auto& s : samples)
    CHECK((si_predict(plant, model, s.state) - s.tau).cwiseAbs().maxCoeff() <
          1e-8);
  // and no larger in norm than the true solution
  CHECK(model.beta.norm() <= si_true_beta(plant).norm() + 1e-10);
}

TEST_CASE("fitting noisy data stays finite and close") {
  const RobotParams plant;
  std::mt19937_64 rng(23);
  auto samples = oracle_batch(plant, 400, rng);
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (auto& s : samples)
    for (int i = 0; i < 2; ++i) s.tau[i] += noise(rng);
  const SiModel model = si_fit(plant, samples);
  CHECK(all_finite(model.beta));
  CHECK((model.beta - si_true_beta(plant)).norm() < 1e-2);
}
