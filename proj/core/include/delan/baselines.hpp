#ifndef DELAN_BASELINES_HPP_
#define DELAN_BASELINES_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "delan/model.hpp"
#include "delan/robot.hpp"
#include "delan/types.hpp"

namespace delan {

// ---------------------------------------------------------------------------
// Generic feed-forward inverse-dynamics network: (q, qdot, qddot) -> tau.

struct FfnnConfig {
  int n = 2;
  std::vector<int> hidden = {64, 64};
  Activation activation = Activation::Softplus;
};

struct FfnnParams {
  FfnnConfig cfg;
  std::vector<LayerParams> layers;  // hidden layers plus linear output layer

  static FfnnParams init(const FfnnConfig& cfg, std::uint64_t seed);
  int parameter_count() const;
};

Vec ffnn_predict(const FfnnParams& params, const JointState& state);

std::pair<double, std::vector<Mat>> ffnn_loss_and_gradient(
    const FfnnParams& params, const std::vector<DynSample>& batch,
    double lambda);

class FfnnLossGraph;

// MSE training loss on a reusable tape, same contract as DelanTrainer.
class FfnnTrainer {
 public:
  FfnnTrainer(const FfnnParams& init, double lambda = 1e-4,
              AdamConfig adam = {});
  ~FfnnTrainer();
  double train_step(const std::vector<DynSample>& batch);
  double loss(const std::vector<DynSample>& batch);
  FfnnParams params() const;

 private:
  void ensure_batch(int b);
  double lambda_;
  Adam adam_;
  std::unique_ptr<FfnnLossGraph> graph_;
};

// ---------------------------------------------------------------------------
// System identification on the planar 2-link regressor tau = Y(q,qd,qdd) b.
//
// Base parameters (derivation documented in docs/si_regressor.md):
//   b1 = m1 lc1^2 + I1 + m2 l1^2
//   b2 = m2 lc2^2 + I2
//   b3 = m2 l1 lc2
//   b4 = m1 lc1 + m2 l1
//   b5 = m2 lc2

struct SiModel {
  Vec beta;           // 5 base parameters
  int rank = 0;       // rank of the stacked regressor (identifiable subspace)
  int feature_dim() const { return static_cast<int>(beta.size()); }
};

inline constexpr int kSiFeatureDim = 5;

// 2 x 5 regressor; only the gravity constant enters besides the joint state.
Mat si_features(const RobotParams& geometry, const JointState& state);

// Exact base parameters of a given plant, used to validate the regressor.
Vec si_true_beta(const RobotParams& p);

// Minimum-norm least squares over the stacked regressor; rank-deficient
// stacks are reported through SiModel::rank. `ridge` regularizes the
// normal-equation fallback used if the decomposition yields non-finite
// values.
SiModel si_fit(const RobotParams& geometry,
               const std::vector<DynSample>& samples, double ridge = 1e-8);

Vec si_predict(const RobotParams& geometry, const SiModel& model,
               const JointState& state);

}  // namespace delan

#endif  // DELAN_BASELINES_HPP_
