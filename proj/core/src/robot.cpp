#include "delan/robot.hpp"

#include <cmath>

namespace delan {

namespace {

void check_dof(const Vec& v, const char* what) {
  if (v.size() != 2)
    throw ShapeError(std::string("robot: ") + what + " must have length 2");
}

}  // namespace

Mat mass_matrix(const RobotParams& p, const Vec& q) {
  check_dof(q, "q");
  const double c2 = std::cos(q[1]);
  const double a = p.m1 * p.lc1 * p.lc1 + p.I1 +
                   p.m2 * (p.l1 * p.l1 + p.lc2 * p.lc2) + p.I2;
  const double b = p.m2 * p.l1 * p.lc2;
  const double d = p.m2 * p.lc2 * p.lc2 + p.I2;
  Mat H(2, 2);
  H(0, 0) = a + 2.0 * b * c2;
  H(0, 1) = d + b * c2;
  H(1, 0) = H(0, 1);
  H(1, 1) = d;
  return H;
}

Vec coriolis_vector(const RobotParams& p, const Vec& q, const Vec& qdot) {
  check_dof(q, "q");
  check_dof(qdot, "qdot");
  const double s2 = std::sin(q[1]);
  const double b = p.m2 * p.l1 * p.lc2;
  Vec c(2);
  c[0] = -b * s2 * (2.0 * qdot[0] * qdot[1] + qdot[1] * qdot[1]);
  c[1] = b * s2 * qdot[0] * qdot[0];
  return c;
}

Vec gravity_vector(const RobotParams& p, const Vec& q) {
  check_dof(q, "q");
  const double g = p.gravity;
  Vec gv(2);
  gv[0] = (p.m1 * p.lc1 + p.m2 * p.l1) * g * std::sin(q[0]) +
          p.m2 * p.lc2 * g * std::sin(q[0] + q[1]);
  gv[1] = p.m2 * p.lc2 * g * std::sin(q[0] + q[1]);
  return gv;
}

Vec oracle_inverse_dynamics(const RobotParams& p, const JointState& s) {
  return mass_matrix(p, s.q) * s.qddot + coriolis_vector(p, s.q, s.qdot) +
         gravity_vector(p, s.q);
}

Vec oracle_forward_dynamics(const RobotParams& p, const Vec& q,
                            const Vec& qdot, const Vec& tau) {
  const Mat H = mass_matrix(p, q);
  const Vec rhs = tau - coriolis_vector(p, q, qdot) - gravity_vector(p, q);
  return H.ldlt().solve(rhs);
}

Energy energy(const RobotParams& p, const Vec& q, const Vec& qdot) {
  Energy e;
  e.kinetic = 0.5 * qdot.dot(mass_matrix(p, q) * qdot);
  const double g = p.gravity;
  e.potential = p.m1 * g * p.lc1 * (1.0 - std::cos(q[0])) +
                p.m2 * g * (p.l1 * (1.0 - std::cos(q[0])) +
                            p.lc2 * (1.0 - std::cos(q[0] + q[1])));
  return e;
}

RobotState step(const RobotParams& p, const Vec& q, const Vec& qdot,
                const Vec& tau, double dt) {
  if (!(dt > 0.0)) throw NumericError("robot: step requires dt > 0");

  auto accel = [&](const Vec& qi, const Vec& qdi) {
    return oracle_forward_dynamics(p, qi, qdi, tau);
  };

  const Vec k1q = qdot;
  const Vec k1v = accel(q, qdot);
  const Vec k2q = qdot + 0.5 * dt * k1v;
  const Vec k2v = accel(q + 0.5 * dt * k1q, qdot + 0.5 * dt * k1v);
  const Vec k3q = qdot + 0.5 * dt * k2v;
  const Vec k3v = accel(q + 0.5 * dt * k2q, qdot + 0.5 * dt * k2v);
  const Vec k4q = qdot + dt * k3v;
  const Vec k4v = accel(q + dt * k3q, qdot + dt * k3v);

  RobotState out;
  out.q = q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  out.qdot = qdot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  if (!all_finite(out.q) || !all_finite(out.qdot))
    throw NumericError("robot: non-finite state after integration step");
  return out;
}

Eigen::Vector2d forward_kinematics(const RobotParams& p, const Vec& q) {
  check_dof(q, "q");
  Eigen::Vector2d xy;
  xy[0] = p.l1 * std::sin(q[0]) + p.l2 * std::sin(q[0] + q[1]);
  xy[1] = -p.l1 * std::cos(q[0]) - p.l2 * std::cos(q[0] + q[1]);
  return xy;
}

}  // namespace delan
