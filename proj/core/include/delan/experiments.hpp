#ifndef DELAN_EXPERIMENTS_HPP_
#define DELAN_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "delan/baselines.hpp"
#include "delan/model.hpp"
#include "delan/robot.hpp"
#include "delan/trajectory.hpp"

namespace delan {

// Offline training datasets: one labelled sample stream per glyph.
std::vector<std::vector<DynSample>> character_datasets(const RobotParams& plant,
                                                       int count, double fd,
                                                       std::uint64_t seed = 7);

struct Dataset {
  std::vector<DynSample> train;
  std::vector<DynSample> test;
};

// First n_train glyph streams become the training set, the rest the test set.
Dataset split_characters(const std::vector<std::vector<DynSample>>& per_char,
                         int n_train);

struct TrainOptions {
  int steps = 4000;
  int batch = 64;
  double lambda = 1e-4;
  AdamConfig adam = {};
};

// Seeded minibatch training; input whitening is fitted on the training set.
DelanParams train_delan_offline(const DelanConfig& cfg,
                                const std::vector<DynSample>& train,
                                std::uint64_t seed, const TrainOptions& opt);
FfnnParams train_ffnn_offline(const FfnnConfig& cfg,
                              const std::vector<DynSample>& train,
                              std::uint64_t seed, const TrainOptions& opt);

// Mean/std whitening of the joint positions, as fitted by the offline
// trainers; exposed so online learners can be seeded from reference data.
void fit_input_whitening(const std::vector<DynSample>& data, Vec& mean,
                         Vec& scale);

using TorquePredictor = std::function<Vec(const JointState&)>;

// Mean over samples of the squared torque-prediction error (summed over
// joints).
double torque_mse(const TorquePredictor& predict,
                  const std::vector<DynSample>& data);

}  // namespace delan

#endif  // DELAN_EXPERIMENTS_HPP_
