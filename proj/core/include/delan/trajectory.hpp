#ifndef DELAN_TRAJECTORY_HPP_
#define DELAN_TRAJECTORY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "delan/robot.hpp"
#include "delan/types.hpp"

namespace delan {

// A reference trajectory sampled at a fixed rate; every point carries the
// desired position, velocity and acceleration.
struct DesiredTrajectory {
  double dt = 0.0;
  std::vector<JointState> points;
};

// Joint-space cosine references: q_d(t) = offset + A cos(2 pi f s t + phi).
// The velocity scale s compresses time, so velocities scale by s and
// accelerations by s^2.
DesiredTrajectory cosine_trajectory(const Vec& amplitude, const Vec& frequency,
                                    const Vec& phase, const Vec& offset,
                                    double duration, double velocity_scale,
                                    double fd);

// A planar single-stroke glyph as a truncated Fourier series, so positions,
// velocities and accelerations are analytic.
struct Stroke {
  std::string name;
  double duration = 3.0;
  double cx = 0.0, cy = 0.0;
  Vec ax, bx, ay, by;  // harmonic coefficients

  void eval(double t, double& x, double& y, double& xd, double& yd,
            double& xdd, double& ydd) const;
};

using CharacterSet = std::vector<Stroke>;

// Deterministic synthetic glyph set, rescaled into the arm's reachable
// annulus with margin.
CharacterSet synth_characters(int count, const RobotParams& params,
                              std::uint64_t seed = 7);

// Analytic 2-link inverse kinematics (elbow-down branch) plus Jacobian-based
// velocity/acceleration references. Throws naming the point if a stroke
// sample is unreachable.
DesiredTrajectory character_to_joint(const Stroke& stroke,
                                     const RobotParams& params, double fd);

// Inverse kinematics for a single point; exposed for tests.
Vec inverse_kinematics(const RobotParams& params, double x, double y);

// Adds i.i.d. N(0, sigma^2) noise to every field (q, qdot, qddot, tau).
std::vector<DynSample> corrupt(const std::vector<DynSample>& samples,
                               double sigma, std::uint64_t seed);

// CSV schema: '#'-prefixed header carrying n and dt, then one row per
// sample: t, q_1..q_n, qd_1..qd_n, qdd_1..qdd_n, tau_1..tau_n.
void export_csv(const std::vector<DynSample>& samples, const std::string& path,
                double dt);
std::vector<DynSample> import_csv(const std::string& path,
                                  double* dt_out = nullptr);

// Labels the desired states of a trajectory with the plant's exact inverse
// dynamics; the standard offline training-set generator.
std::vector<DynSample> label_with_oracle(const RobotParams& plant,
                                         const DesiredTrajectory& traj);

}  // namespace delan

#endif  // DELAN_TRAJECTORY_HPP_
