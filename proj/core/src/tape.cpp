#include "delan/tape.hpp"

#include <cmath>
#include <cstdio>

namespace delan {

namespace {

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string shape_str(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double unary_apply(UnaryFn f, double x) {
  switch (f) {
    case UnaryFn::Softplus: return softplus(x);
    case UnaryFn::Sigmoid: return sigmoid(x);
    case UnaryFn::SigmoidGrad: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case UnaryFn::Relu: return x > 0.0 ? x : 0.0;
    case UnaryFn::Step: return x > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double unary_grad(UnaryFn f, double x) {
  switch (f) {
    case UnaryFn::Softplus: return sigmoid(x);
    case UnaryFn::Sigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case UnaryFn::SigmoidGrad: {
      const double s = sigmoid(x);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case UnaryFn::Relu: return x > 0.0 ? 1.0 : 0.0;
    case UnaryFn::Step: return 0.0;
  }
  return 0.0;
}

Tape::Id Tape::push(Node n) {
  const Id id = static_cast<Id>(nodes_.size());
  if (n.label.empty()) n.label = "node_" + std::to_string(id);
  nodes_.push_back(std::move(n));
  return id;
}

const Tape::Node& Tape::at(Id id) const {
  if (id < 0 || id >= static_cast<Id>(nodes_.size()))
    throw ShapeError("tape: invalid node id " + std::to_string(id));
  return nodes_[id];
}

void Tape::check_shape(Id id, int rows, int cols, const char* op) const {
  const Node& n = at(id);
  if (n.rows != rows || n.cols != cols)
    throw ShapeError(std::string("tape: ") + op + " shape mismatch at node '" +
                     n.label + "' (" + std::to_string(n.rows) + "x" +
                     std::to_string(n.cols) + " vs expected " +
                     std::to_string(rows) + "x" + std::to_string(cols) + ")");
}

Tape::Id Tape::input(int rows, int cols, std::string label) {
  Node n;
  n.kind = OpKind::Input;
  n.rows = rows;
  n.cols = cols;
  n.label = std::move(label);
  const Id id = push(std::move(n));
  inputs_.push_back(id);
  return id;
}

Tape::Id Tape::param(Mat init, std::string label) {
  if (!all_finite(init))
    throw NumericError("tape: non-finite parameter init '" + label + "'");
  Node n;
  n.kind = OpKind::Param;
  n.rows = static_cast<int>(init.rows());
  n.cols = static_cast<int>(init.cols());
  n.value = std::move(init);
  n.label = std::move(label);
  const Id id = push(std::move(n));
  params_.push_back(id);
  return id;
}

Tape::Id Tape::constant(Mat value, std::string label) {
  if (!all_finite(value))
    throw NumericError("tape: non-finite constant '" + label + "'");
  Node n;
  n.kind = OpKind::Const;
  n.rows = static_cast<int>(value.rows());
  n.cols = static_cast<int>(value.cols());
  n.value = std::move(value);
  n.label = std::move(label);
  return push(std::move(n));
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Node& na = at(a);
  const Node& nb = at(b);
  if (na.cols != nb.rows)
    throw ShapeError("tape: matmul inner dimension mismatch at nodes '" +
                     na.label + "' and '" + nb.label + "'");
  Node n;
  n.kind = OpKind::MatMul;
  n.a = a;
  n.b = b;
  n.rows = na.rows;
  n.cols = nb.cols;
  return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
  const Node& na = at(a);
  check_shape(b, na.rows, na.cols, "add");
  Node n;
  n.kind = OpKind::Add;
  n.a = a;
  n.b = b;
  n.rows = na.rows;
  n.cols = na.cols;
  return push(std::move(n));
}

Tape::Id Tape::scale(Id a, double s) {
  const Node& na = at(a);
  Node n;
  n.kind = OpKind::Scale;
  n.a = a;
  n.scalar = s;
  n.rows = na.rows;
  n.cols = na.cols;
  return push(std::move(n));
}

Tape::Id Tape::transpose(Id a) {
  const Node& na = at(a);
  Node n;
  n.kind = OpKind::Transpose;
  n.a = a;
  n.rows = na.cols;
  n.cols = na.rows;
  return push(std::move(n));
}

Tape::Id Tape::unary(Id a, UnaryFn f) {
  const Node& na = at(a);
  Node n;
  n.kind = OpKind::Unary;
  n.a = a;
  n.fn = f;
  n.rows = na.rows;
  n.cols = na.cols;
  return push(std::move(n));
}

Tape::Id Tape::diag_embed(Id a) {
  const Node& na = at(a);
  if (na.cols != 1)
    throw ShapeError("tape: diag_embed expects a column vector at node '" +
                     na.label + "'");
  Node n;
  n.kind = OpKind::DiagEmbed;
  n.a = a;
  n.rows = na.rows;
  n.cols = na.rows;
  return push(std::move(n));
}

Tape::Id Tape::reshape(Id a, int rows, int cols) {
  const Node& na = at(a);
  if (na.rows * na.cols != rows * cols)
    throw ShapeError("tape: reshape element count mismatch at node '" +
                     na.label + "'");
  Node n;
  n.kind = OpKind::Reshape;
  n.a = a;
  n.rows = rows;
  n.cols = cols;
  return push(std::move(n));
}

Tape::Id Tape::slice(Id a, int r0, int c0, int rows, int cols) {
  const Node& na = at(a);
  if (r0 < 0 || c0 < 0 || r0 + rows > na.rows || c0 + cols > na.cols)
    throw ShapeError("tape: slice out of range at node '" + na.label + "'");
  Node n;
  n.kind = OpKind::Slice;
  n.a = a;
  n.r0 = r0;
  n.c0 = c0;
  n.rows = rows;
  n.cols = cols;
  return push(std::move(n));
}

Tape::Id Tape::sum_sq(Id a) {
  Node n;
  n.kind = OpKind::SumSq;
  n.a = a;
  n.rows = 1;
  n.cols = 1;
  return push(std::move(n));
}

void Tape::mark_output(Id id) {
  at(id);
  outputs_.push_back(id);
}

std::vector<Mat> Tape::forward(const std::vector<Mat>& inputs) {
  if (inputs.size() != inputs_.size())
    throw ShapeError("tape: expected " + std::to_string(inputs_.size()) +
                     " inputs, got " + std::to_string(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Node& n = nodes_[inputs_[i]];
    if (inputs[i].rows() != n.rows || inputs[i].cols() != n.cols)
      throw ShapeError("tape: input shape mismatch at node '" + n.label +
                       "' (got " + shape_str(inputs[i]) + ", expected " +
                       std::to_string(n.rows) + "x" + std::to_string(n.cols) +
                       ")");
    if (!all_finite(inputs[i]))
      throw NumericError("tape: non-finite input at node '" + n.label + "'");
    n.value = inputs[i];
  }

  for (Node& n : nodes_) {
    switch (n.kind) {
      case OpKind::Input:
      case OpKind::Param:
      case OpKind::Const:
        break;
      case OpKind::MatMul:
        n.value.noalias() = nodes_[n.a].value * nodes_[n.b].value;
        break;
      case OpKind::Add:
        n.value = nodes_[n.a].value + nodes_[n.b].value;
        break;
      case OpKind::Scale:
        n.value = n.scalar * nodes_[n.a].value;
        break;
      case OpKind::Transpose:
        n.value = nodes_[n.a].value.transpose();
        break;
      case OpKind::Unary: {
        const Mat& x = nodes_[n.a].value;
        n.value.resize(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i)
          n.value.data()[i] = unary_apply(n.fn, x.data()[i]);
        break;
      }
      case OpKind::DiagEmbed:
        n.value = Mat::Zero(n.rows, n.cols);
        n.value.diagonal() = nodes_[n.a].value.col(0);
        break;
      case OpKind::Reshape:
        n.value = Eigen::Map<const Mat>(nodes_[n.a].value.data(), n.rows, n.cols);
        break;
      case OpKind::Slice:
        n.value = nodes_[n.a].value.block(n.r0, n.c0, n.rows, n.cols);
        break;
      case OpKind::SumSq:
        n.value = Mat::Constant(1, 1, nodes_[n.a].value.squaredNorm());
        break;
    }
  }
  forward_done_ = true;

  std::vector<Mat> out;
  out.reserve(outputs_.size());
  for (Id id : outputs_) {
    if (!all_finite(nodes_[id].value))
      throw NumericError("tape: non-finite output at node '" +
                         nodes_[id].label + "'");
    out.push_back(nodes_[id].value);
  }
  return out;
}

void Tape::backward(const std::vector<Mat>& output_cotangents) {
  if (!forward_done_)
    throw NumericError("tape: backward called before forward");
  if (output_cotangents.size() != outputs_.size())
    throw ShapeError("tape: expected " + std::to_string(outputs_.size()) +
                     " cotangents, got " +
                     std::to_string(output_cotangents.size()));

  for (Node& n : nodes_) n.adjoint = Mat::Zero(n.rows, n.cols);
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    Node& n = nodes_[outputs_[i]];
    if (output_cotangents[i].rows() != n.rows ||
        output_cotangents[i].cols() != n.cols)
      throw ShapeError("tape: cotangent shape mismatch at node '" + n.label +
                       "'");
    n.adjoint += output_cotangents[i];
  }

  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = *it;
    const Mat& g = n.adjoint;
    switch (n.kind) {
      case OpKind::Input:
      case OpKind::Param:
      case OpKind::Const:
        break;
      case OpKind::MatMul:
        nodes_[n.a].adjoint.noalias() += g * nodes_[n.b].value.transpose();
        nodes_[n.b].adjoint.noalias() += nodes_[n.a].value.transpose() * g;
        break;
      case OpKind::Add:
        nodes_[n.a].adjoint += g;
        nodes_[n.b].adjoint += g;
        break;
      case OpKind::Scale:
        nodes_[n.a].adjoint += n.scalar * g;
        break;
      case OpKind::Transpose:
        nodes_[n.a].adjoint += g.transpose();
        break;
      case OpKind::Unary: {
        const Mat& x = nodes_[n.a].value;
        Mat& ga = nodes_[n.a].adjoint;
        for (Eigen::Index i = 0; i < x.size(); ++i)
          ga.data()[i] += g.data()[i] * unary_grad(n.fn, x.data()[i]);
        break;
      }
      case OpKind::DiagEmbed:
        nodes_[n.a].adjoint.col(0) += g.diagonal();
        break;
      case OpKind::Reshape: {
        Node& na = nodes_[n.a];
        na.adjoint += Eigen::Map<const Mat>(g.data(), na.rows, na.cols);
        break;
      }
      case OpKind::Slice:
        nodes_[n.a].adjoint.block(n.r0, n.c0, n.rows, n.cols) += g;
        break;
      case OpKind::SumSq:
        nodes_[n.a].adjoint += 2.0 * g(0, 0) * nodes_[n.a].value;
        break;
    }
  }
}

const Mat& Tape::adjoint(Id id) const {
  const Node& n = at(id);
  if (n.adjoint.size() == 0)
    throw NumericError("tape: adjoint requested before backward at node '" +
                       n.label + "'");
  return n.adjoint;
}

Mat& Tape::param_value(Id id) {
  Node& n = nodes_.at(id);
  if (n.kind != OpKind::Param)
    throw ShapeError("tape: node '" + n.label + "' is not a parameter");
  return n.value;
}

GradCheckReport grad_check(Tape& tape, const std::vector<Mat>& inputs,
                           double fd_step) {
  auto scalar_out = [&]() {
    const std::vector<Mat> out = tape.forward(inputs);
    if (out.empty() || out[0].size() != 1)
      throw ShapeError("grad_check: tape must have a scalar first output");
    return out[0](0, 0);
  };

  scalar_out();
  std::vector<Mat> cots;
  for (Tape::Id id : tape.output_ids()) {
    Mat c = Mat::Zero(tape.value(id).rows(), tape.value(id).cols());
    cots.push_back(c);
  }
  cots[0](0, 0) = 1.0;
  tape.backward(cots);

  std::vector<Mat> analytic;
  for (Tape::Id p : tape.param_ids()) analytic.push_back(tape.adjoint(p));

  GradCheckReport report;
  const auto& pids = tape.param_ids();
  for (std::size_t pi = 0; pi < pids.size(); ++pi) {
    Mat& pv = tape.param_value(pids[pi]);
    GradCheckEntry entry;
    entry.param = tape.label(pids[pi]);
    for (Eigen::Index i = 0; i < pv.size(); ++i) {
      const double orig = pv.data()[i];
      pv.data()[i] = orig + fd_step;
      const double fp = scalar_out();
      pv.data()[i] = orig - fd_step;
      const double fm = scalar_out();
      pv.data()[i] = orig;
      const double numeric = (fp - fm) / (2.0 * fd_step);
      const double a = analytic[pi].data()[i];
      const double rel = std::abs(a - numeric) /
                         std::max({1.0, std::abs(a), std::abs(numeric)});
      entry.max_rel_error = std::max(entry.max_rel_error, rel);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.per_param.push_back(std::move(entry));
  }
  // restore cached values for the unperturbed parameters
  tape.forward(inputs);
  return report;
}

Mat cholesky_solve(const Mat& L, const Mat& rhs) {
  if (L.rows() != L.cols())
    throw ShapeError("cholesky_solve: L must be square");
  if (L.rows() != rhs.rows())
    throw ShapeError("cholesky_solve: rhs row count mismatch");
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0))
      throw NumericError("cholesky_solve: non-positive diagonal at row " +
                         std::to_string(i));
  }
  Mat y = L.triangularView<Eigen::Lower>().solve(rhs);
  Mat x = L.transpose().triangularView<Eigen::Upper>().solve(y);
  return x;
}

}  // namespace delan
