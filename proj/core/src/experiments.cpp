#include "delan/experiments.hpp"

#include <cmath>
#include <random>

namespace delan {

std::vector<std::vector<DynSample>> character_datasets(const RobotParams& plant,
                                                       int count, double fd,
                                                       std::uint64_t seed) {
  const CharacterSet chars = synth_characters(count, plant, seed);
  std::vector<std::vector<DynSample>> out;
  out.reserve(chars.size());
  for (const Stroke& stroke : chars)
    out.push_back(label_with_oracle(plant, character_to_joint(stroke, plant,
                                                              fd)));
  return out;
}

Dataset split_characters(const std::vector<std::vector<DynSample>>& per_char,
                         int n_train) {
  if (n_train < 0 || n_train > static_cast<int>(per_char.size()))
    throw ShapeError("experiments: invalid training split " +
                     std::to_string(n_train) + " of " +
                     std::to_string(per_char.size()));
  Dataset ds;
  for (int i = 0; i < static_cast<int>(per_char.size()); ++i) {
    auto& dst = i < n_train ? ds.train : ds.test;
    dst.insert(dst.end(), per_char[i].begin(), per_char[i].end());
  }
  return ds;
}

void fit_input_whitening(const std::vector<DynSample>& data, Vec& mean,
                         Vec& scale) {
  if (data.empty()) throw ShapeError("experiments: empty whitening data");
  const int n = data.front().state.dof();
  mean = Vec::Zero(n);
  for (const auto& s : data) mean += s.state.q;
  mean /= static_cast<double>(data.size());
  Vec var = Vec::Zero(n);
  for (const auto& s : data)
    var += (s.state.q - mean).cwiseProduct(s.state.q - mean);
  var /= static_cast<double>(data.size());
  scale = var.cwiseSqrt().cwiseMax(1e-3);
}

namespace {

std::vector<DynSample> draw_batch(const std::vector<DynSample>& train,
                                  int batch, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  std::vector<DynSample> out;
  out.reserve(batch);
  for (int i = 0; i < batch; ++i) out.push_back(train[pick(rng)]);
  return out;
}

}  // namespace

DelanParams train_delan_offline(const DelanConfig& cfg,
                                const std::vector<DynSample>& train,
                                std::uint64_t seed, const TrainOptions& opt) {
  if (train.empty()) throw ShapeError("experiments: empty training set");
  DelanParams params = DelanParams::init(cfg, seed);
  fit_input_whitening(train, params.norm_mean, params.norm_scale);

  DelanTrainer trainer(params, opt.lambda, opt.adam);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int batch = std::min<int>(opt.batch, static_cast<int>(train.size()));
  for (int step = 0; step < opt.steps; ++step)
    trainer.train_step(draw_batch(train, batch, rng));
  return trainer.params();
}

FfnnParams train_ffnn_offline(const FfnnConfig& cfg,
                              const std::vector<DynSample>& train,
                              std::uint64_t seed, const TrainOptions& opt) {
  if (train.empty()) throw ShapeError("experiments: empty training set");
  FfnnTrainer trainer(FfnnParams::init(cfg, seed), opt.lambda, opt.adam);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int batch = std::min<int>(opt.batch, static_cast<int>(train.size()));
  for (int step = 0; step < opt.steps; ++step)
    trainer.train_step(draw_batch(train, batch, rng));
  return trainer.params();
}

double torque_mse(const TorquePredictor& predict,
                  const std::vector<DynSample>& data) {
  if (data.empty()) throw ShapeError("experiments: empty evaluation set");
  double sum = 0.0;
  for (const auto& s : data) sum += (predict(s.state) - s.tau).squaredNorm();
  return sum / static_cast<double>(data.size());
}

}  // namespace delan
