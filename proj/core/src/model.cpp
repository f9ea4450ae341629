#include "delan/model.hpp"

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

// Row-major packing maps: vec(L) = Pd l_d + Po l_o (+ offset on diagonal).
Mat packing_diag(int n) {
  Mat P = Mat::Zero(n * n, n);
  for (int i = 0; i < n; ++i) P(i * n + i, i) = 1.0;
  return P;
}

Mat packing_lower(int n) {
  const int k = n * (n - 1) / 2;
  Mat P = Mat::Zero(n * n, std::max(1, k));
  int col = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) P(i * n + j, col++) = 1.0;
  return P;
}

void check_vec(const Vec& v, int len, const char* what) {
  if (v.size() != len)
    throw ShapeError(std::string("delan: ") + what + " has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(len));
}

}  // namespace

DelanParams DelanParams::init(const DelanConfig& cfg, std::uint64_t seed) {
  if (cfg.n < 1) throw ShapeError("delan: dof count must be positive");
  if (!(cfg.diag_offset > 0.0))
    throw NumericError("delan: diag_offset must be positive");
  std::mt19937_64 rng(seed);
  DelanParams p;
  p.cfg = cfg;
  int in = cfg.n;
  for (int width : cfg.hidden) {
    LayerParams lp;
    lp.W = uniform_fan_in(width, in, rng);
    lp.b = Vec::Zero(width);
    p.trunk.push_back(std::move(lp));
    in = width;
  }
  const int k = std::max(1, cfg.n * (cfg.n - 1) / 2);
  p.head_ld = {uniform_fan_in(cfg.n, in, rng), Vec::Zero(cfg.n)};
  p.head_lo = {uniform_fan_in(k, in, rng), Vec::Zero(k)};
  p.head_g = {uniform_fan_in(cfg.n, in, rng), Vec::Zero(cfg.n)};
  p.norm_mean = Vec::Zero(cfg.n);
  p.norm_scale = Vec::Ones(cfg.n);
  return p;
}

int DelanParams::parameter_count() const {
  int count = 0;
  for (const auto& lp : trunk)
    count += static_cast<int>(lp.W.size() + lp.b.size());
  for (const auto* lp : {&head_ld, &head_lo, &head_g})
    count += static_cast<int>(lp->W.size() + lp->b.size());
  return count;
}

LagrangianLayerOutput lagrangian_layer(const Vec& h_prev, const Mat& dhprev_dq,
                                       const Mat& W, const Vec& b,
                                       Activation act) {
  if (W.cols() != h_prev.size())
    throw ShapeError("delan: layer weight/input mismatch");
  if (dhprev_dq.rows() != h_prev.size())
    throw ShapeError("delan: layer jacobian/input mismatch");
  const auto [fv, fg] = act_fns(act);
  const Vec a = W * h_prev + b;
  LagrangianLayerOutput out;
  out.h.resize(a.size());
  Vec gp(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.h[i] = unary_apply(fv, a[i]);
    gp[i] = unary_grad(fv, a[i]);
    (void)fg;
  }
  out.dh_dq = gp.asDiagonal() * W * dhprev_dq;
  return out;
}

HeadsOutput network_heads(const DelanParams& params, const Vec& q) {
  const int n = params.cfg.n;
  check_vec(q, n, "q");

  Vec h = (q - params.norm_mean).cwiseQuotient(params.norm_scale);
  Mat dh_dq = params.norm_scale.cwiseInverse().asDiagonal();
  for (const auto& lp : params.trunk) {
    auto out = lagrangian_layer(h, dh_dq, lp.W, lp.b, params.cfg.activation);
    h = std::move(out.h);
    dh_dq = std::move(out.dh_dq);
  }

  HeadsOutput out;
  // Diagonal head is always softplus so the diagonal stays non-negative.
  auto ld = lagrangian_layer(h, dh_dq, params.head_ld.W, params.head_ld.b,
                             Activation::Softplus);
  out.l_d = std::move(ld.h);
  out.dld_dq = std::move(ld.dh_dq);
  out.l_o = params.head_lo.W * h + params.head_lo.b;
  out.dlo_dq = params.head_lo.W * dh_dq;
  out.g = params.head_g.W * h + params.head_g.b;
  return out;
}

Mat assemble_L(const Vec& l_d, const Vec& l_o, double diag_offset) {
  const int n = static_cast<int>(l_d.size());
  const int k = n * (n - 1) / 2;
  if (static_cast<int>(l_o.size()) < k)
    throw ShapeError("delan: l_o has too few entries");
  Mat L = Mat::Zero(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) L(i, j) = l_o[idx++];
    L(i, i) = l_d[i] + diag_offset;
    if (!(L(i, i) > 0.0))
      throw NumericError("delan: non-positive diagonal of L at row " +
                         std::to_string(i));
  }
  return L;
}

std::vector<Mat> assemble_dL_dq(const Mat& dld_dq, const Mat& dlo_dq) {
  const int n = static_cast<int>(dld_dq.rows());
  if (dld_dq.cols() != n || dlo_dq.cols() != n)
    throw ShapeError("delan: jacobian column count must equal dof");
  std::vector<Mat> dL(n);
  for (int c = 0; c < n; ++c) {
    Mat d = Mat::Zero(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) d(i, j) = dlo_dq(idx++, c);
      d(i, i) = dld_dq(i, c);
    }
    dL[c] = std::move(d);
  }
  return dL;
}

Mat time_derivative_H(const Mat& L, const std::vector<Mat>& dL_dq,
                      const Vec& qdot) {
  const int n = static_cast<int>(L.rows());
  Mat dLdt = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) dLdt += dL_dq[i] * qdot[i];
  return L * dLdt.transpose() + dLdt * L.transpose();
}

Vec quadratic_dq(const Mat& L, const std::vector<Mat>& dL_dq,
                 const Vec& qdot) {
  const int n = static_cast<int>(L.rows());
  const Vec u = L.transpose() * qdot;
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = 2.0 * qdot.dot(dL_dq[i] * u);
  return out;
}

DelanEval evaluate(const DelanParams& params, const Vec& q, const Vec& qdot) {
  const HeadsOutput heads = network_heads(params, q);
  DelanEval eval;
  eval.L = assemble_L(heads.l_d, heads.l_o, params.cfg.diag_offset);
  const std::vector<Mat> dL = assemble_dL_dq(heads.dld_dq, heads.dlo_dq);
  eval.H = eval.L * eval.L.transpose();
  eval.dH_dt = time_derivative_H(eval.L, dL, qdot);
  eval.quad_dq = quadratic_dq(eval.L, dL, qdot);
  eval.g = heads.g;
  return eval;
}

Vec inverse_dynamics(const DelanParams& params, const JointState& state) {
  if (!state.consistent())
    throw ShapeError("delan: inconsistent joint state");
  const DelanEval e = evaluate(params, state.q, state.qdot);
  return e.H * state.qddot + e.dH_dt * state.qdot - 0.5 * e.quad_dq + e.g;
}

Vec forward_dynamics(const DelanParams& params, const Vec& q, const Vec& qdot,
                     const Vec& tau) {
  const DelanEval e = evaluate(params, q, qdot);
  const Vec rhs = tau - e.dH_dt * qdot + 0.5 * e.quad_dq - e.g;
  return cholesky_solve(e.L, rhs);
}

TorqueDecomposition decompose(const DelanParams& params,
                              const JointState& state) {
  const DelanEval e = evaluate(params, state.q, state.qdot);
  TorqueDecomposition d;
  d.inertial = e.H * state.qddot;
  d.coriolis = e.dH_dt * state.qdot - 0.5 * e.quad_dq;
  d.gravity = e.g;
  return d;
}

double weight_norm(const DelanParams& params) {
  double norm = 0.0;
  for (const auto& lp : params.trunk)
    norm += lp.W.squaredNorm() + lp.b.squaredNorm();
  for (const auto* lp : {&params.head_ld, &params.head_lo, &params.head_g})
    norm += lp->W.squaredNorm() + lp->b.squaredNorm();
  return norm;
}

DelanLossGraph::DelanLossGraph(const DelanParams& init, int batch_size,
                               double lambda)
    : cfg_(init.cfg),
      norm_mean_(init.norm_mean),
      norm_scale_(init.norm_scale),
      batch_size_(batch_size),
      lambda_(lambda) {
  if (batch_size < 1) throw ShapeError("delan: batch size must be positive");
  const int n = cfg_.n;

  // Parameter leaves, flat order: trunk (W, b)..., head_ld, head_lo, head_g.
  std::vector<std::pair<Tape::Id, Tape::Id>> trunk_ids;
  for (std::size_t i = 0; i < init.trunk.size(); ++i) {
    Tape::Id w = tape_.param(init.trunk[i].W, "trunk_W" + std::to_string(i));
    Tape::Id b = tape_.param(Mat(init.trunk[i].b),
                             "trunk_b" + std::to_string(i));
    param_nodes_.push_back(w);
    param_nodes_.push_back(b);
    trunk_ids.emplace_back(w, b);
  }
  auto head = [&](const LayerParams& lp, const char* name) {
    Tape::Id w = tape_.param(lp.W, std::string(name) + "_W");
    Tape::Id b = tape_.param(Mat(lp.b), std::string(name) + "_b");
    param_nodes_.push_back(w);
    param_nodes_.push_back(b);
    return std::make_pair(w, b);
  };
  const auto [wld, bld] = head(init.head_ld, "head_ld");
  const auto [wlo, blo] = head(init.head_lo, "head_lo");
  const auto [wg, bg] = head(init.head_g, "head_g");

  // Shared constants.
  Mat sinv = norm_scale_.cwiseInverse().asDiagonal();
  const Tape::Id c_sinv = tape_.constant(sinv, "input_scale");
  Mat nb = -(norm_mean_.cwiseQuotient(norm_scale_));
  const Tape::Id c_nbias = tape_.constant(nb, "input_shift");
  const Tape::Id c_pd = tape_.constant(packing_diag(n), "pack_diag");
  const Tape::Id c_po = tape_.constant(packing_lower(n), "pack_lower");
  Mat voff = Mat::Zero(n * n, 1);
  for (int i = 0; i < n; ++i) voff(i * n + i, 0) = cfg_.diag_offset;
  const Tape::Id c_off = tape_.constant(voff, "diag_offset");

  const auto [act_v, act_g] = act_fns(cfg_.activation);

  Tape::Id sq_sum = -1;
  for (int s = 0; s < batch_size_; ++s) {
    const std::string tag = "_s" + std::to_string(s);
    const Tape::Id q = tape_.input(n, 1, "q" + tag);
    const Tape::Id qd = tape_.input(n, 1, "qdot" + tag);
    const Tape::Id qdd = tape_.input(n, 1, "qddot" + tag);
    const Tape::Id tau = tape_.input(n, 1, "tau" + tag);
    input_nodes_.insert(input_nodes_.end(), {q, qd, qdd, tau});

    // Trunk of Lagrangian layers: each emits h and dh/dq in one pass.
    Tape::Id h = tape_.add(tape_.matmul(c_sinv, q), c_nbias);
    Tape::Id jac = c_sinv;
    for (const auto& [w, b] : trunk_ids) {
      const Tape::Id a = tape_.add(tape_.matmul(w, h), b);
      h = tape_.unary(a, act_v);
      jac = tape_.matmul(
          tape_.matmul(tape_.diag_embed(tape_.unary(a, act_g)), w), jac);
    }

    const Tape::Id a_ld = tape_.add(tape_.matmul(wld, h), bld);
    const Tape::Id l_d = tape_.unary(a_ld, UnaryFn::Softplus);
    const Tape::Id dld = tape_.matmul(
        tape_.matmul(tape_.diag_embed(tape_.unary(a_ld, UnaryFn::Sigmoid)),
                     wld),
        jac);
    const Tape::Id l_o = tape_.add(tape_.matmul(wlo, h), blo);
    const Tape::Id dlo = tape_.matmul(wlo, jac);
    const Tape::Id g = tape_.add(tape_.matmul(wg, h), bg);

    const Tape::Id vecL = tape_.add(
        tape_.add(tape_.matmul(c_pd, l_d), tape_.matmul(c_po, l_o)), c_off);
    const Tape::Id L = tape_.reshape(vecL, n, n);
    const Tape::Id Lt = tape_.transpose(L);
    const Tape::Id dvecL = tape_.add(tape_.matmul(c_pd, dld),
                                     tape_.matmul(c_po, dlo));  // n^2 x n

    const Tape::Id dLdt = tape_.reshape(tape_.matmul(dvecL, qd), n, n);
    const Tape::Id dHdt = tape_.add(tape_.matmul(L, tape_.transpose(dLdt)),
                                    tape_.matmul(dLdt, Lt));

    // quad_i = qdot^T (dH/dq_i) qdot = 2 (dvecL col i) . vec(qdot u^T),
    // with u = L^T qdot.
    const Tape::Id u = tape_.matmul(Lt, qd);
    const Tape::Id w_outer =
        tape_.reshape(tape_.matmul(qd, tape_.transpose(u)), n * n, 1);
    const Tape::Id quad =
        tape_.scale(tape_.matmul(tape_.transpose(dvecL), w_outer), 2.0);

    const Tape::Id h_qdd = tape_.matmul(L, tape_.matmul(Lt, qdd));
    const Tape::Id tau_hat = tape_.add(
        tape_.add(h_qdd, tape_.matmul(dHdt, qd)),
        tape_.add(tape_.scale(quad, -0.5), g));
    tau_hat_nodes_.push_back(tau_hat);

    const Tape::Id sq = tape_.sum_sq(tape_.sub(tau_hat, tau));
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

std::vector<Mat> DelanLossGraph::bind_inputs(
    const std::vector<DynSample>& batch) const {
  if (static_cast<int>(batch.size()) != batch_size_)
    throw ShapeError("delan: batch size mismatch (tape built for " +
                     std::to_string(batch_size_) + ", got " +
                     std::to_string(batch.size()) + ")");
  std::vector<Mat> inputs;
  inputs.reserve(4 * batch.size());
  for (const DynSample& s : batch) {
    inputs.push_back(Mat(s.state.q));
    inputs.push_back(Mat(s.state.qdot));
    inputs.push_back(Mat(s.state.qddot));
    inputs.push_back(Mat(s.tau));
  }
  return inputs;
}

double DelanLossGraph::loss(const std::vector<DynSample>& batch) {
  return tape_.forward(bind_inputs(batch))[0](0, 0);
}

double DelanLossGraph::loss_and_gradient(const std::vector<DynSample>& batch) {
  const double value = loss(batch);
  tape_.backward({Mat::Constant(1, 1, 1.0)});
  return value;
}

std::vector<Mat> DelanLossGraph::gradients() const {
  std::vector<Mat> grads;
  grads.reserve(param_nodes_.size());
  for (Tape::Id p : param_nodes_) grads.push_back(tape_.adjoint(p));
  return grads;
}

std::vector<Mat*> DelanLossGraph::parameter_values() {
  std::vector<Mat*> values;
  values.reserve(param_nodes_.size());
  for (Tape::Id p : param_nodes_) values.push_back(&tape_.param_value(p));
  return values;
}

DelanParams DelanLossGraph::snapshot() const {
  DelanParams p;
  p.cfg = cfg_;
  p.norm_mean = norm_mean_;
  p.norm_scale = norm_scale_;
  std::size_t i = 0;
  auto take = [&]() -> LayerParams {
    LayerParams lp;
    lp.W = tape_.value(param_nodes_[i++]);
    lp.b = Vec(tape_.value(param_nodes_[i++]).col(0));
    return lp;
  };
  for (std::size_t l = 0; l < cfg_.hidden.size(); ++l)
    p.trunk.push_back(take());
  p.head_ld = take();
  p.head_lo = take();
  p.head_g = take();
  return p;
}

Vec DelanLossGraph::predicted_tau(int i) const {
  return Vec(tape_.value(tau_hat_nodes_.at(i)).col(0));
}

std::pair<double, std::vector<Mat>> loss_and_gradient(
    const DelanParams& params, const std::vector<DynSample>& batch,
    double lambda) {
  if (batch.empty()) throw ShapeError("delan: empty batch");
  DelanLossGraph graph(params, static_cast<int>(batch.size()), lambda);
  const double value = graph.loss_and_gradient(batch);
  return {value, graph.gradients()};
}

void Adam::step(const std::vector<Mat*>& params,
                const std::vector<Mat>& grads) {
  if (params.size() != grads.size())
    throw ShapeError("adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const Mat* p : params) {
      m_.push_back(Mat::Zero(p->rows(), p->cols()));
      v_.push_back(Mat::Zero(p->rows(), p->cols()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
    v_[i] = cfg_.beta2 * v_[i] +
            (1.0 - cfg_.beta2) * grads[i].cwiseProduct(grads[i]);
    const Mat mhat = m_[i] / bc1;
    const Mat vhat = v_[i] / bc2;
    params[i]->array() -=
        cfg_.lr * mhat.array() / (vhat.array().sqrt() + cfg_.eps);
  }
}

DelanTrainer::DelanTrainer(const DelanParams& init, double lambda,
                           AdamConfig adam)
    : lambda_(lambda),
      adam_(adam),
      graph_(std::make_unique<DelanLossGraph>(init, 1, lambda)) {}

void DelanTrainer::ensure_batch(int b) {
  if (graph_->batch_size() != b)
    graph_ = std::make_unique<DelanLossGraph>(graph_->snapshot(), b, lambda_);
}

double DelanTrainer::train_step(const std::vector<DynSample>& batch) {
  if (batch.empty()) throw ShapeError("delan: empty batch");
  ensure_batch(static_cast<int>(batch.size()));
  const double value = graph_->loss_and_gradient(batch);
  if (!std::isfinite(value))
    throw NumericError("delan: non-finite training loss");
  adam_.step(graph_->parameter_values(), graph_->gradients());
  return value;
}

double DelanTrainer::loss(const std::vector<DynSample>& batch) {
  if (batch.empty()) throw ShapeError("delan: empty batch");
  ensure_batch(static_cast<int>(batch.size()));
  return graph_->loss(batch);
}

}  // namespace delan
