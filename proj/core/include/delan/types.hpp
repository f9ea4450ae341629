#ifndef DELAN_TYPES_HPP_
#define DELAN_TYPES_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace delan {

// All numerics are double precision; matrices are row-major so that the
// flattened serialization order is unambiguous.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

inline bool all_finite(const Mat& m) { return m.allFinite(); }
inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Generalized positions, velocities and accelerations of an n-dof system.
struct JointState {
  Vec q;
  Vec qdot;
  Vec qddot;

  int dof() const { return static_cast<int>(q.size()); }
  bool consistent() const {
    return q.size() == qdot.size() && q.size() == qddot.size() &&
           all_finite(q) && all_finite(qdot) && all_finite(qddot);
  }
};

/// One training tuple: a joint state plus the applied generalized forces.
struct DynSample {
  double t = 0.0;
  JointState state;
  Vec tau;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace delan

#endif  // DELAN_TYPES_HPP_
