#ifndef DELAN_ROBOT_HPP_
#define DELAN_ROBOT_HPP_

#include "delan/types.hpp"

namespace delan {

// Closed-form dynamics of a planar 2-link manipulator. Joint angles are
// measured from the downward vertical, so the hanging rest state is q = 0.
// q1 is the absolute angle of link 1, q2 the relative angle of link 2.
struct RobotParams {
  double m1 = 1.0, m2 = 1.0;     // link masses [kg]
  double l1 = 0.5, l2 = 0.5;     // link lengths [m]
  double lc1 = 0.25, lc2 = 0.25; // center-of-mass offsets [m]
  double I1 = 1.0 / 48.0;        // thin-rod inertia m*l^2/12 [kg m^2]
  double I2 = 1.0 / 48.0;
  double gravity = 9.81;         // [m/s^2]

  static RobotParams point_masses(double m1, double m2, double l1, double l2,
                                  double gravity = 9.81) {
    RobotParams p;
    p.m1 = m1; p.m2 = m2;
    p.l1 = l1; p.l2 = l2;
    p.lc1 = l1; p.lc2 = l2;
    p.I1 = 0.0; p.I2 = 0.0;
    p.gravity = gravity;
    return p;
  }
};

Mat mass_matrix(const RobotParams& p, const Vec& q);
Vec coriolis_vector(const RobotParams& p, const Vec& q, const Vec& qdot);
Vec gravity_vector(const RobotParams& p, const Vec& q);

// tau = H(q) qddot + c(q, qdot) + g(q), and its exact inverse.
Vec oracle_inverse_dynamics(const RobotParams& p, const JointState& s);
Vec oracle_forward_dynamics(const RobotParams& p, const Vec& q,
                            const Vec& qdot, const Vec& tau);

// Kinetic and potential energy; V(0) = 0 at the hanging rest state.
struct Energy {
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + potential; }
};
Energy energy(const RobotParams& p, const Vec& q, const Vec& qdot);

// One classical RK4 step of the forward dynamics under constant torque.
struct RobotState {
  Vec q;
  Vec qdot;
};
RobotState step(const RobotParams& p, const Vec& q, const Vec& qdot,
                const Vec& tau, double dt);

// Planar forward kinematics of the end effector.
Eigen::Vector2d forward_kinematics(const RobotParams& p, const Vec& q);

}  // namespace delan

#endif  // DELAN_ROBOT_HPP_
