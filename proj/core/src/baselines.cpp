#include "delan/baselines.hpp"

#include <cmath>
#include <random>

namespace delan {

namespace {

std::pair<UnaryFn, UnaryFn> act_fns(Activation act) {
  switch (act) {
    case Activation::Softplus: return {UnaryFn::Softplus, UnaryFn::Sigmoid};
    case Activation::Relu: return {UnaryFn::Relu, UnaryFn::Step};
  }
  return {UnaryFn::Softplus, UnaryFn::Sigmoid};
}

Mat uniform_fan_in(int rows, int cols, std::mt19937_64& rng) {
  const double s = std::sqrt(1.0 / std::max(1, cols));
  std::uniform_real_distribution<double> dist(-s, s);
  Mat W(rows, cols);
  for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = dist(rng);
  return W;
}

Vec stack_state(const JointState& s) {
  Vec x(3 * s.dof());
  x << s.q, s.qdot, s.qddot;
  return x;
}

}  // namespace

FfnnParams FfnnParams::init(const FfnnConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FfnnParams p;
  p.cfg = cfg;
  int in = 3 * cfg.n;
  for (int width : cfg.hidden) {
    p.layers.push_back({uniform_fan_in(width, in, rng), Vec::Zero(width)});
    in = width;
  }
  p.layers.push_back({uniform_fan_in(cfg.n, in, rng), Vec::Zero(cfg.n)});
  return p;
}

int FfnnParams::parameter_count() const {
  int count = 0;
  for (const auto& lp : layers)
    count += static_cast<int>(lp.W.size() + lp.b.size());
  return count;
}

Vec ffnn_predict(const FfnnParams& params, const JointState& state) {
  if (!state.consistent() || state.dof() != params.cfg.n)
    throw ShapeError("ffnn: inconsistent joint state");
  const auto [fv, fg] = act_fns(params.cfg.activation);
  (void)fg;
  Vec h = stack_state(state);
  for (std::size_t i = 0; i + 1 < params.layers.size(); ++i) {
    Vec a = params.layers[i].W * h + params.layers[i].b;
    for (Eigen::Index j = 0; j < a.size(); ++j) a[j] = unary_apply(fv, a[j]);
    h = std::move(a);
  }
  const auto& out = params.layers.back();
  return out.W * h + out.b;
}

// Batch MSE loss graph for the plain MLP.
class FfnnLossGraph {
 public:
  FfnnLossGraph(const FfnnParams& init, int batch_size, double lambda)
      : cfg_(init.cfg), batch_size_(batch_size), lambda_(lambda) {
    const int n = cfg_.n;
    std::vector<std::pair<Tape::Id, Tape::Id>> layer_ids;
    for (std::size_t i = 0; i < init.layers.size(); ++i) {
      Tape::Id w = tape_.param(init.layers[i].W, "W" + std::to_string(i));
      Tape::Id b = tape_.param(Mat(init.layers[i].b), "b" + std::to_string(i));
      param_nodes_.push_back(w);
      param_nodes_.push_back(b);
      layer_ids.emplace_back(w, b);
    }
    const auto [act_v, act_g] = act_fns(cfg_.activation);
    (void)act_g;

    Tape::Id sq_sum = -1;
    for (int s = 0; s < batch_size_; ++s) {
      const Tape::Id x = tape_.input(3 * n, 1, "x_s" + std::to_string(s));
      const Tape::Id tau = tape_.input(n, 1, "tau_s" + std::to_string(s));
      input_nodes_.push_back(x);
      input_nodes_.push_back(tau);
      Tape::Id h = x;
      for (std::size_t i = 0; i < layer_ids.size(); ++i) {
        const auto [w, b] = layer_ids[i];
        const Tape::Id a = tape_.add(tape_.matmul(w, h), b);
        h = (i + 1 < layer_ids.size()) ? tape_.unary(a, act_v) : a;
      }
      const Tape::Id sq = tape_.sum_sq(tape_.sub(h, tau));
      sq_sum = (sq_sum < 0) ? sq : tape_.add(sq_sum, sq);
    }
    Tape::Id loss = tape_.scale(sq_sum, 1.0 / batch_size_);
    if (lambda_ != 0.0) {
      Tape::Id reg = -1;
      for (Tape::Id p : param_nodes_) {
        const Tape::Id sq = tape_.sum_sq(p);
        reg = (reg < 0) ? sq : tape_.add(reg, sq);
      }
      loss = tape_.add(loss, tape_.scale(reg, lambda_));
    }
    tape_.mark_output(loss);
  }

  double loss(const std::vector<DynSample>& batch) {
    if (static_cast<int>(batch.size()) != batch_size_)
      throw ShapeError("ffnn: batch size mismatch");
    std::vector<Mat> inputs;
    inputs.reserve(2 * batch.size());
    for (const DynSample& s : batch) {
      inputs.push_back(Mat(stack_state(s.state)));
      inputs.push_back(Mat(s.tau));
    }
    return tape_.forward(inputs)[0](0, 0);
  }

  double loss_and_gradient(const std::vector<DynSample>& batch) {
    const double value = loss(batch);
    tape_.backward({Mat::Constant(1, 1, 1.0)});
    return value;
  }

  std::vector<Mat> gradients() const {
    std::vector<Mat> grads;
    for (Tape::Id p : param_nodes_) grads.push_back(tape_.adjoint(p));
    return grads;
  }

  std::vector<Mat*> parameter_values() {
    std::vector<Mat*> values;
    for (Tape::Id p : param_nodes_) values.push_back(&tape_.param_value(p));
    return values;
  }

  FfnnParams snapshot() const {
    FfnnParams p;
    p.cfg = cfg_;
    for (std::size_t i = 0; i < param_nodes_.size(); i += 2) {
      LayerParams lp;
      lp.W = tape_.value(param_nodes_[i]);
      lp.b = Vec(tape_.value(param_nodes_[i + 1]).col(0));
      p.layers.push_back(std::move(lp));
    }
    return p;
  }

  int batch_size() const { return batch_size_; }

 private:
  FfnnConfig cfg_;
  int batch_size_;
  double lambda_;
  Tape tape_;
  std::vector<Tape::Id> param_nodes_;
  std::vector<Tape::Id> input_nodes_;
};

FfnnTrainer::FfnnTrainer(const FfnnParams& init, double lambda,
                         AdamConfig adam)
    : lambda_(lambda),
      adam_(adam),
      graph_(std::make_unique<FfnnLossGraph>(init, 1, lambda)) {}

FfnnTrainer::~FfnnTrainer() = default;

void FfnnTrainer::ensure_batch(int b) {
  if (graph_->batch_size() != b)
    graph_ = std::make_unique<FfnnLossGraph>(graph_->snapshot(), b, lambda_);
}

double FfnnTrainer::train_step(const std::vector<DynSample>& batch) {
  if (batch.empty()) throw ShapeError("ffnn: empty batch");
  ensure_batch(static_cast<int>(batch.size()));
  const double value = graph_->loss_and_gradient(batch);
  if (!std::isfinite(value))
    throw NumericError("ffnn: non-finite training loss");
  adam_.step(graph_->parameter_values(), graph_->gradients());
  return value;
}

double FfnnTrainer::loss(const std::vector<DynSample>& batch) {
  if (batch.empty()) throw ShapeError("ffnn: empty batch");
  ensure_batch(static_cast<int>(batch.size()));
  return graph_->loss(batch);
}

FfnnParams FfnnTrainer::params() const { return graph_->snapshot(); }

std::pair<double, std::vector<Mat>> ffnn_loss_and_gradient(
    const FfnnParams& params, const std::vector<DynSample>& batch,
    double lambda) {
  if (batch.empty()) throw ShapeError("ffnn: empty batch");
  FfnnLossGraph graph(params, static_cast<int>(batch.size()), lambda);
  const double value = graph.loss_and_gradient(batch);
  return {value, graph.gradients()};
}

// ---------------------------------------------------------------------------

Mat si_features(const RobotParams& geometry, const JointState& state) {
  if (state.dof() != 2)
    throw ShapeError("si: regressor supports only the 2-dof arm");
  const double q1 = state.q[0], q2 = state.q[1];
  const double qd1 = state.qdot[0], qd2 = state.qdot[1];
  const double a1 = state.qddot[0], a2 = state.qddot[1];
  const double c2 = std::cos(q2), s2 = std::sin(q2);
  const double g = geometry.gravity;

  Mat Y = Mat::Zero(2, kSiFeatureDim);
  Y(0, 0) = a1;
  Y(0, 1) = a1 + a2;
  Y(0, 2) = c2 * (2.0 * a1 + a2) - s2 * (2.0 * qd1 * qd2 + qd2 * qd2);
  Y(0, 3) = g * std::sin(q1);
  Y(0, 4) = g * std::sin(q1 + q2);
  Y(1, 1) = a1 + a2;
  Y(1, 2) = c2 * a1 + s2 * qd1 * qd1;
  Y(1, 4) = g * std::sin(q1 + q2);
  return Y;
}

Vec si_true_beta(const RobotParams& p) {
  Vec beta(kSiFeatureDim);
  beta[0] = p.m1 * p.lc1 * p.lc1 + p.I1 + p.m2 * p.l1 * p.l1;
  beta[1] = p.m2 * p.lc2 * p.lc2 + p.I2;
  beta[2] = p.m2 * p.l1 * p.lc2;
  beta[3] = p.m1 * p.lc1 + p.m2 * p.l1;
  beta[4] = p.m2 * p.lc2;
  return beta;
}

SiModel si_fit(const RobotParams& geometry,
               const std::vector<DynSample>& samples, double ridge) {
  if (samples.empty()) throw ShapeError("si: no samples");
  const int rows = 2 * static_cast<int>(samples.size());
  Mat Y(rows, kSiFeatureDim);
  Vec tau(rows);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Y.block(2 * i, 0, 2, kSiFeatureDim) =
        si_features(geometry, samples[i].state);
    tau.segment(2 * i, 2) = samples[i].tau;
  }

  SiModel model;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(Y);
  model.rank = static_cast<int>(cod.rank());
  model.beta = cod.solve(tau);
  if (!all_finite(model.beta)) {
    // ill-conditioned stack: ridge-regularized normal equations
    Mat A = Y.transpose() * Y +
            ridge * Mat::Identity(kSiFeatureDim, kSiFeatureDim);
    model.beta = A.ldlt().solve(Y.transpose() * tau);
  }
  return model;
}

Vec si_predict(const RobotParams& geometry, const SiModel& model,
               const JointState& state) {
  return si_features(geometry, state) * model.beta;
}

}  // namespace delan
