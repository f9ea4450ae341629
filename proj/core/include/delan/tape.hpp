#ifndef DELAN_TAPE_HPP_
#define DELAN_TAPE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "delan/types.hpp"

namespace delan {

// Elementwise primitives. Each entry knows its own derivative, so one level
// of reverse mode is enough even for graphs that already contain first
// derivatives (Sigmoid = softplus', Step = relu').
enum class UnaryFn { Softplus, Sigmoid, SigmoidGrad, Relu, Step };

double unary_apply(UnaryFn f, double x);
double unary_grad(UnaryFn f, double x);

// A static computation graph over dense matrices with reverse-mode
// differentiation. The graph is built once; forward() binds fresh input
// values and backward() accumulates adjoints into every leaf.
//
// Nodes are topologically ordered by construction: an operation can only
// reference ids that already exist.
class Tape {
 public:
  using Id = int;

  enum class OpKind {
    Input, Param, Const,
    MatMul, Add, Scale, Transpose, Unary, DiagEmbed, Reshape, Slice, SumSq
  };

  struct Node {
    OpKind kind;
    Id a = -1;
    Id b = -1;
    UnaryFn fn = UnaryFn::Softplus;
    double scalar = 0.0;
    int r0 = 0, c0 = 0;
    int rows = 0, cols = 0;
    Mat value;
    Mat adjoint;
    std::string label;
  };

  // Leaves.
  Id input(int rows, int cols, std::string label = "");
  Id param(Mat init, std::string label = "");
  Id constant(Mat value, std::string label = "");

  // Primitives.
  Id matmul(Id a, Id b);
  Id add(Id a, Id b);
  Id scale(Id a, double s);
  Id transpose(Id a);
  Id unary(Id a, UnaryFn f);
  Id diag_embed(Id a);                       // n-vector -> n x n diagonal
  Id reshape(Id a, int rows, int cols);      // row-major reindexing
  Id slice(Id a, int r0, int c0, int rows, int cols);
  Id sum_sq(Id a);                           // 1 x 1 scalar

  // Composites.
  Id sub(Id a, Id b) { return add(a, scale(b, -1.0)); }

  void mark_output(Id id);

  // Runs the recorded computation on fresh input values and returns the
  // marked outputs. Values of all nodes are cached for backward().
  std::vector<Mat> forward(const std::vector<Mat>& inputs);

  // Accumulates d(sum_k cotangent_k . output_k)/d(leaf) into every leaf
  // adjoint. Requires a prior forward() on this tape.
  void backward(const std::vector<Mat>& output_cotangents);

  const Mat& value(Id id) const { return nodes_.at(id).value; }
  const Mat& adjoint(Id id) const;
  Mat& param_value(Id id);
  const std::string& label(Id id) const { return nodes_.at(id).label; }

  const std::vector<Id>& param_ids() const { return params_; }
  const std::vector<Id>& input_ids() const { return inputs_; }
  const std::vector<Id>& output_ids() const { return outputs_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  Id push(Node n);
  const Node& at(Id id) const;
  void check_shape(Id id, int rows, int cols, const char* op) const;

  std::vector<Node> nodes_;
  std::vector<Id> inputs_;
  std::vector<Id> params_;
  std::vector<Id> outputs_;
  bool forward_done_ = false;
};

struct GradCheckEntry {
  std::string param;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<GradCheckEntry> per_param;
};

// Compares backward() against central finite differences of the first
// (scalar) output with respect to every parameter entry. The relative error
// uses max(1, |analytic|, |numeric|) as denominator so near-zero gradients
// are compared absolutely.
GradCheckReport grad_check(Tape& tape, const std::vector<Mat>& inputs,
                           double fd_step = 1e-6);

// Solves (L L^T) x = rhs for a lower-triangular L with positive diagonal.
// Throws NumericError naming the offending row if a diagonal entry is not
// strictly positive.
Mat cholesky_solve(const Mat& L, const Mat& rhs);

}  // namespace delan

#endif  // DELAN_TAPE_HPP_
