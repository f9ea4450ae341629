#include <doctest.h>

#include <cmath>
#include <random>

#include "delan/robot.hpp"
#include "test_util.hpp"

using namespace delan;
using test::random_vec;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// independent route: H from finite differences of the kinetic energy
Mat mass_matrix_from_energy(const RobotParams& p, const Vec& q) {
  Mat H(2, 2);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto T = [&](double vi, double vj) {
        Vec qd = Vec::Zero(2);
        qd[i] += vi;
        qd[j] += vj;
        return energy(p, q, qd).kinetic;
      };
      // T = 1/2 qd^T H qd, so H_ij via the mixed second difference
      H(i, j) = (T(h, h) - T(h, -h) - T(-h, h) + T(-h, -h)) / (4.0 * h * h);
      if (i == j) H(i, j) = 2.0 * energy(p, q, Vec::Unit(2, i)).kinetic;
    }
  return H;
}

}  // namespace

TEST_CASE("mass matrix of the point-mass arm") {
  const RobotParams p = RobotParams::point_masses(1.0, 1.0, 1.0, 1.0);
  const Mat H = mass_matrix(p, vec2(0.3, 0.0));
  CHECK(H(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(H(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(H(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(H(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mass matrix agrees with kinetic-energy finite differences") {
  const RobotParams p;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec q = random_vec(2, rng, kPi);
    const Mat H = mass_matrix(p, q);
    const Mat Hfd = mass_matrix_from_energy(p, q);
    CHECK(test::max_rel_err(H, Hfd) < 1e-6);
  }
}

TEST_CASE("mass matrix is even in q2 and positive definite") {
  const RobotParams p;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec q = random_vec(2, rng, kPi);
    const Mat H = mass_matrix(p, q);
    CHECK(H(0, 1) == H(1, 0));
    const Mat Hm = mass_matrix(p, vec2(q[0], -q[1]));
    CHECK((H - Hm).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("coriolis vector basics") {
  const RobotParams p;
  const Vec q = vec2(0.4, -0.9);
  CHECK(coriolis_vector(p, q, Vec::Zero(2)).norm() == 0.0);
  const Vec qd = vec2(1.2, -0.7);
  const Vec c1 = coriolis_vector(p, q, qd);
  const Vec c2 = coriolis_vector(p, q, 2.0 * qd);
  CHECK((c2 - 4.0 * c1).norm() < 1e-12);
}

TEST_CASE("coriolis equals Hdot qd - 1/2 d(qd' H qd)/dq by finite differences") {
  const RobotParams p;
  std::mt19937_64 rng(6);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec q = random_vec(2, rng, kPi);
    const Vec qd = random_vec(2, rng, 2.0);

    // Hdot = sum_i dH/dq_i qd_i by central differences
    Mat Hdot = Mat::Zero(2, 2);
    Vec quad(2);
    for (int i = 0; i < 2; ++i) {
      Vec qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Mat dH = (mass_matrix(p, qp) - mass_matrix(p, qm)) / (2.0 * h);
      Hdot += dH * qd[i];
      quad[i] = qd.dot(dH * qd);
    }
    const Vec expected = Hdot * qd - 0.5 * quad;
    const Vec c = coriolis_vector(p, q, qd);
    CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("gravity vector") {
  const RobotParams p;
  CHECK(gravity_vector(p, Vec::Zero(2)).norm() == 0.0);  // hanging rest

  RobotParams zero_g = p;
  zero_g.gravity = 0.0;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec q = random_vec(2, rng, kPi);
    CHECK(gravity_vector(zero_g, q).norm() == 0.0);

    // matches finite differences of the potential
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Vec qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const double dV =
          (energy(p, qp, Vec::Zero(2)).potential -
           energy(p, qm, Vec::Zero(2)).potential) /
          (2.0 * h);
      CHECK(std::abs(gravity_vector(p, q)[i] - dV) < 1e-8);
    }
  }
}

TEST_CASE("inverse and forward dynamics are mutual inverses") {
  const RobotParams p;
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    JointState s{random_vec(2, rng, kPi), random_vec(2, rng, 3.0),
                 random_vec(2, rng, 5.0)};
    const Vec tau = oracle_inverse_dynamics(p, s);
    const Vec qdd = oracle_forward_dynamics(p, s.q, s.qdot, tau);
    CHECK((qdd - s.qddot).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("statics: tau equals gravity and the horizontal hold torque") {
  const RobotParams p = RobotParams::point_masses(1.0, 1.0, 1.0, 1.0);
  JointState s{vec2(0.7, 0.4), Vec::Zero(2), Vec::Zero(2)};
  CHECK((oracle_inverse_dynamics(p, s) - gravity_vector(p, s.q)).norm() <
        1e-14);

  // second link horizontal: lever arm 1 m on 1 kg end mass
  JointState hold{vec2(0.0, kPi / 2.0), Vec::Zero(2), Vec::Zero(2)};
  const Vec tau = oracle_inverse_dynamics(p, hold);
  CHECK(tau[1] == doctest::Approx(9.81).epsilon(1e-12));
}

TEST_CASE("compensated statics holds still") {
  const RobotParams p;
  const Vec q0 = vec2(0.5, -0.3);
  Vec q = q0, qd = Vec::Zero(2);
  const Vec tau = gravity_vector(p, q0);
  for (int i = 0; i < 100; ++i) {
    const RobotState next = step(p, q, qd, tau, 1e-3);
    q = next.q;
    qd = next.qdot;
  }
  CHECK((q - q0).norm() < 1e-9);
}

TEST_CASE("free pendulum conserves energy over 10 s") {
  const RobotParams p;
  Vec q = vec2(1.2, 0.4), qd = Vec::Zero(2);
  const Vec tau = Vec::Zero(2);
  const double e0 = energy(p, q, qd).total();
  double max_drift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const RobotState next = step(p, q, qd, tau, 1e-3);
    q = next.q;
    qd = next.qdot;
    max_drift = std::max(max_drift,
                         std::abs(energy(p, q, qd).total() - e0));
  }
  CHECK(max_drift / std::abs(e0) < 1e-6);
}

TEST_CASE("RK4 is fourth order under step halving") {
  const RobotParams p;
  const Vec q0 = vec2(0.8, -0.5), qd0 = vec2(0.3, 0.2);
  const Vec tau = vec2(0.5, -0.2);

  auto integrate = [&](double dt, double T) {
    Vec q = q0, qd = qd0;
    const int steps = static_cast<int>(std::round(T / dt));
    for (int i = 0; i < steps; ++i) {
      const RobotState next = step(p, q, qd, tau, dt);
      q = next.q;
      qd = next.qdot;
    }
    return q;
  };

  const Vec ref = integrate(1e-5, 0.5);
  const double e1 = (integrate(4e-3, 0.5) - ref).norm();
  const double e2 = (integrate(2e-3, 0.5) - ref).norm();
  const double ratio = e1 / e2;
  CHECK(ratio > 10.0);  // ~16x for a 4th-order method
  CHECK(ratio < 24.0);
}

TEST_CASE("power balance dE/dt = tau . qdot along a forced trajectory") {
  const RobotParams p;
  Vec q = vec2(0.2, 0.1), qd = vec2(0.5, -0.4);
  const Vec tau = vec2(1.0, 0.3);
  const double dt = 1e-5;
  for (int i = 0; i < 2000; ++i) {
    const double e_before = energy(p, q, qd).total();
    const RobotState next = step(p, q, qd, tau, dt);
    const double e_after = energy(p, next.q, next.qdot).total();
    const double power = tau.dot(0.5 * (qd + next.qdot));
    CHECK(std::abs((e_after - e_before) / dt - power) < 1e-5);
    q = next.q;
    qd = next.qdot;
  }
}

TEST_CASE("energy basics") {
  const RobotParams p;
  const Vec q = vec2(0.9, -1.1);
  CHECK(energy(p, q, Vec::Zero(2)).kinetic == 0.0);
  const Vec qd = vec2(0.7, 0.2);
  CHECK(energy(p, q, 2.0 * qd).kinetic ==
        doctest::Approx(4.0 * energy(p, q, qd).kinetic).epsilon(1e-12));
  CHECK(energy(p, Vec::Zero(2), Vec::Zero(2)).potential == 0.0);
}
