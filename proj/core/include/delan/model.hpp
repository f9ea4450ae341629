#ifndef DELAN_MODEL_HPP_
#define DELAN_MODEL_HPP_

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "delan/tape.hpp"
#include "delan/types.hpp"

namespace delan {

enum class Activation { Softplus, Relu };

struct LayerParams {
  Mat W;
  Vec b;
};

struct DelanConfig {
  int n = 2;                       // degrees of freedom
  std::vector<int> hidden = {64, 64};
  Activation activation = Activation::Softplus;
  double diag_offset = 1e-2;       // added to the diagonal of L, fixed
};

// All trainable weights of the network: a shared trunk and three heads
// producing the diagonal of L, the strictly-lower entries of L, and g(q).
struct DelanParams {
  DelanConfig cfg;
  std::vector<LayerParams> trunk;
  LayerParams head_ld;   // n outputs, passed through softplus
  LayerParams head_lo;   // n(n-1)/2 outputs, linear
  LayerParams head_g;    // n outputs, linear
  Vec norm_mean;         // input whitening, identity by default
  Vec norm_scale;

  static DelanParams init(const DelanConfig& cfg, std::uint64_t seed);
  int parameter_count() const;
  int off_diag_count() const { return cfg.n * (cfg.n - 1) / 2; }
};

// One network layer evaluated together with the Jacobian of its activation
// with respect to the network input.
struct LagrangianLayerOutput {
  Vec h;
  Mat dh_dq;
};
LagrangianLayerOutput lagrangian_layer(const Vec& h_prev, const Mat& dhprev_dq,
                                       const Mat& W, const Vec& b,
                                       Activation act);

struct HeadsOutput {
  Vec l_d;     // after softplus, before diag offset
  Vec l_o;
  Vec g;
  Mat dld_dq;  // |l_d| x n
  Mat dlo_dq;  // |l_o| x n
};
HeadsOutput network_heads(const DelanParams& params, const Vec& q);

// Fills a lower-triangular matrix: diagonal = l_d + diag_offset, strictly
// lower entries from l_o in row-major order. Throws if the resulting
// diagonal is not strictly positive.
Mat assemble_L(const Vec& l_d, const Vec& l_o, double diag_offset);

// Applies the same packing to the Jacobian columns, yielding dL/dq_i.
std::vector<Mat> assemble_dL_dq(const Mat& dld_dq, const Mat& dlo_dq);

// dH/dt = L (dL/dt)^T + (dL/dt) L^T with dL/dt = sum_i (dL/dq_i) qdot_i.
Mat time_derivative_H(const Mat& L, const std::vector<Mat>& dL_dq,
                      const Vec& qdot);

// Entry i equals qdot^T (dH/dq_i) qdot.
Vec quadratic_dq(const Mat& L, const std::vector<Mat>& dL_dq, const Vec& qdot);

struct DelanEval {
  Mat L;
  Mat H;
  Mat dH_dt;
  Vec quad_dq;
  Vec g;
};
DelanEval evaluate(const DelanParams& params, const Vec& q, const Vec& qdot);

// tau = H qddot + dH/dt qdot - 1/2 quad_dq + g, in one feed-forward pass.
Vec inverse_dynamics(const DelanParams& params, const JointState& state);

// qddot = (L L^T)^{-1} (tau - dH/dt qdot + 1/2 quad_dq - g).
Vec forward_dynamics(const DelanParams& params, const Vec& q, const Vec& qdot,
                     const Vec& tau);

struct TorqueDecomposition {
  Vec inertial;   // H qddot
  Vec coriolis;   // dH/dt qdot - 1/2 quad_dq
  Vec gravity;    // g
};
TorqueDecomposition decompose(const DelanParams& params,
                              const JointState& state);

// Squared L2 norm of all weights and biases (the scaling penalty).
double weight_norm(const DelanParams& params);

// The training loss as a reusable tape: mean_b ||tau_hat - tau||^2 + lambda
// * weight_norm. The tape owns the parameter values while training; a
// snapshot can be exported at any time.
class DelanLossGraph {
 public:
  DelanLossGraph(const DelanParams& init, int batch_size, double lambda);

  double loss(const std::vector<DynSample>& batch);
  double loss_and_gradient(const std::vector<DynSample>& batch);

  std::vector<Mat> gradients() const;
  std::vector<Mat*> parameter_values();
  DelanParams snapshot() const;

  int batch_size() const { return batch_size_; }
  double lambda() const { return lambda_; }
  Tape& tape() { return tape_; }

  // Predicted torque of sample i from the last forward pass.
  Vec predicted_tau(int i) const;

 private:
  std::vector<Mat> bind_inputs(const std::vector<DynSample>& batch) const;

  DelanConfig cfg_;
  Vec norm_mean_, norm_scale_;
  int batch_size_;
  double lambda_;
  Tape tape_;
  std::vector<Tape::Id> param_nodes_;   // flat order: trunk W,b ... heads
  std::vector<Tape::Id> input_nodes_;   // q, qdot, qddot, tau per sample
  std::vector<Tape::Id> tau_hat_nodes_;
};

std::pair<double, std::vector<Mat>> loss_and_gradient(
    const DelanParams& params, const std::vector<DynSample>& batch,
    double lambda);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
  void step(const std::vector<Mat*>& params, const std::vector<Mat>& grads);
  AdamConfig& config() { return cfg_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Mat> m_, v_;
};

// Convenience wrapper pairing the loss tape with an Adam state. Rebuilds the
// tape transparently when the batch size changes; the optimizer state is
// keyed by the stable flat parameter order and survives rebuilds.
class DelanTrainer {
 public:
  DelanTrainer(const DelanParams& init, double lambda = 1e-4,
               AdamConfig adam = {});

  // One Adam update. Throws NumericError on a non-finite loss.
  double train_step(const std::vector<DynSample>& batch);
  double loss(const std::vector<DynSample>& batch);
  DelanParams params() const { return graph_->snapshot(); }

 private:
  void ensure_batch(int b);
  double lambda_;
  Adam adam_;
  std::unique_ptr<DelanLossGraph> graph_;
};

}  // namespace delan

#endif  // DELAN_MODEL_HPP_
