#include "delan/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace delan {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

DesiredTrajectory cosine_trajectory(const Vec& amplitude, const Vec& frequency,
                                    const Vec& phase, const Vec& offset,
                                    double duration, double velocity_scale,
                                    double fd) {
  const int n = static_cast<int>(amplitude.size());
  if (frequency.size() != n || phase.size() != n || offset.size() != n)
    throw ShapeError("trajectory: cosine parameter length mismatch");
  if (!(fd > 0.0) || !(velocity_scale > 0.0) || !(duration > 0.0))
    throw NumericError("trajectory: fd, velocity_scale, duration must be > 0");

  DesiredTrajectory traj;
  traj.dt = 1.0 / fd;
  const int steps = static_cast<int>(std::floor(duration * fd)) + 1;
  const double s = velocity_scale;
  for (int k = 0; k < steps; ++k) {
    const double t = k * traj.dt;
    JointState st;
    st.q.resize(n);
    st.qdot.resize(n);
    st.qddot.resize(n);
    for (int i = 0; i < n; ++i) {
      const double w = kTwoPi * frequency[i] * s;
      const double arg = w * t + phase[i];
      st.q[i] = offset[i] + amplitude[i] * std::cos(arg);
      st.qdot[i] = -amplitude[i] * w * std::sin(arg);
      st.qddot[i] = -amplitude[i] * w * w * std::cos(arg);
    }
    traj.points.push_back(std::move(st));
  }
  return traj;
}

void Stroke::eval(double t, double& x, double& y, double& xd, double& yd,
                  double& xdd, double& ydd) const {
  const double w0 = kTwoPi / duration;
  x = cx;
  y = cy;
  xd = yd = xdd = ydd = 0.0;
  for (Eigen::Index k = 0; k < ax.size(); ++k) {
    const double w = w0 * static_cast<double>(k + 1);
    const double c = std::cos(w * t), s = std::sin(w * t);
    x += ax[k] * c + bx[k] * s;
    y += ay[k] * c + by[k] * s;
    xd += w * (-ax[k] * s + bx[k] * c);
    yd += w * (-ay[k] * s + by[k] * c);
    xdd += w * w * (-ax[k] * c - bx[k] * s);
    ydd += w * w * (-ay[k] * c - by[k] * s);
  }
}

CharacterSet synth_characters(int count, const RobotParams& params,
                              std::uint64_t seed) {
  const double reach = params.l1 + params.l2;
  const double center_y = -0.65 * reach;
  const double radius = 0.22 * reach;  // keeps all points inside the annulus

  CharacterSet set;
  for (int c = 0; c < count; ++c) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(c));
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const int harmonics = 5;
    Stroke s;
    s.name = std::string(1, static_cast<char>('a' + (c % 26))) +
             (c >= 26 ? std::to_string(c / 26) : "");
    s.duration = 2.0;
    s.ax.resize(harmonics);
    s.bx.resize(harmonics);
    s.ay.resize(harmonics);
    s.by.resize(harmonics);
    for (int k = 0; k < harmonics; ++k) {
      // decaying spectrum: low harmonics give the smooth sweep, the higher
      // ones the sharp turns
      const double decay = 1.0 / (1.0 + 1.2 * k * k);
      s.ax[k] = coeff(rng) * decay;
      s.bx[k] = coeff(rng) * decay;
      s.ay[k] = coeff(rng) * decay;
      s.by[k] = coeff(rng) * decay;
    }
    // rescale the raw curve into a disc of `radius` around the center
    double max_r = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double x, y, xd, yd, xdd, ydd;
      s.eval(s.duration * i / 200.0, x, y, xd, yd, xdd, ydd);
      max_r = std::max(max_r, std::hypot(x, y));
    }
    const double scale = radius / std::max(max_r, 1e-9);
    s.ax *= scale;
    s.bx *= scale;
    s.ay *= scale;
    s.by *= scale;
    s.cx = 0.0;
    s.cy = center_y;
    set.push_back(std::move(s));
  }
  return set;
}

Vec inverse_kinematics(const RobotParams& params, double x, double y) {
  const double l1 = params.l1, l2 = params.l2;
  const double r2 = x * x + y * y;
  const double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c2 > 1.0 + 1e-9 || c2 < -1.0 - 1e-9)
    throw NumericError("trajectory: unreachable point (" + std::to_string(x) +
                       ", " + std::to_string(y) + ")");
  const double q2 = std::acos(std::clamp(c2, -1.0, 1.0));  // elbow-down branch
  const double q1 = std::atan2(x, -y) -
                    std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  Vec q(2);
  q << q1, q2;
  return q;
}

DesiredTrajectory character_to_joint(const Stroke& stroke,
                                     const RobotParams& params, double fd) {
  if (!(fd > 0.0)) throw NumericError("trajectory: fd must be > 0");
  DesiredTrajectory traj;
  traj.dt = 1.0 / fd;
  const int steps = static_cast<int>(std::floor(stroke.duration * fd)) + 1;
  for (int k = 0; k < steps; ++k) {
    const double t = k * traj.dt;
    double x, y, xd, yd, xdd, ydd;
    stroke.eval(t, x, y, xd, yd, xdd, ydd);

    JointState st;
    st.q = inverse_kinematics(params, x, y);
    const double s1 = std::sin(st.q[0]), c1 = std::cos(st.q[0]);
    const double s12 = std::sin(st.q[0] + st.q[1]);
    const double c12 = std::cos(st.q[0] + st.q[1]);
    const double l1 = params.l1, l2 = params.l2;
    Eigen::Matrix2d J;
    J << l1 * c1 + l2 * c12, l2 * c12,
         l1 * s1 + l2 * s12, l2 * s12;
    Eigen::Vector2d v(xd, yd), a(xdd, ydd);
    st.qdot = J.partialPivLu().solve(v);
    // Jdot depends on qdot, so accelerations follow in a second solve.
    const double w1 = st.qdot[0], w12 = st.qdot[0] + st.qdot[1];
    Eigen::Matrix2d Jdot;
    Jdot << -l1 * s1 * w1 - l2 * s12 * w12, -l2 * s12 * w12,
            l1 * c1 * w1 + l2 * c12 * w12, l2 * c12 * w12;
    st.qddot = J.partialPivLu().solve(a - Jdot * Eigen::Vector2d(st.qdot));
    traj.points.push_back(std::move(st));
  }
  return traj;
}

std::vector<DynSample> corrupt(const std::vector<DynSample>& samples,
                               double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw NumericError("trajectory: sigma must be >= 0");
  if (sigma == 0.0) return samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<DynSample> out = samples;
  for (DynSample& s : out) {
    for (Eigen::Index i = 0; i < s.state.q.size(); ++i) {
      s.state.q[i] += noise(rng);
      s.state.qdot[i] += noise(rng);
      s.state.qddot[i] += noise(rng);
      s.tau[i] += noise(rng);
    }
  }
  return out;
}

void export_csv(const std::vector<DynSample>& samples, const std::string& path,
                double dt) {
  std::ofstream file(path);
  if (!file) throw NumericError("trajectory: cannot open " + path);
  const int n = samples.empty() ? 0 : samples.front().state.dof();
  file << "# n=" << n << " dt=" << dt << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    file << ',' << buf;
  };
  for (const DynSample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.t);
    file << buf;
    for (int i = 0; i < n; ++i) put(s.state.q[i]);
    for (int i = 0; i < n; ++i) put(s.state.qdot[i]);
    for (int i = 0; i < n; ++i) put(s.state.qddot[i]);
    for (int i = 0; i < n; ++i) put(s.tau[i]);
    file << '\n';
  }
}

std::vector<DynSample> import_csv(const std::string& path, double* dt_out) {
  std::ifstream file(path);
  if (!file) throw NumericError("trajectory: cannot open " + path);
  std::string line;
  int n = -1;
  double dt = 0.0;
  std::vector<DynSample> samples;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (std::sscanf(line.c_str(), "# n=%d dt=%lf", &n, &dt) != 2)
        throw NumericError("trajectory: malformed header at line " +
                           std::to_string(lineno));
      continue;
    }
    if (n < 0)
      throw NumericError("trajectory: data before header at line " +
                         std::to_string(lineno));
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        fields.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw NumericError("trajectory: malformed value '" + cell +
                           "' at line " + std::to_string(lineno));
      }
    }
    if (static_cast<int>(fields.size()) != 1 + 4 * n)
      throw NumericError("trajectory: expected " + std::to_string(1 + 4 * n) +
                         " columns at line " + std::to_string(lineno) +
                         ", got " + std::to_string(fields.size()));
    DynSample s;
    s.t = fields[0];
    s.state.q = Eigen::Map<Vec>(fields.data() + 1, n);
    s.state.qdot = Eigen::Map<Vec>(fields.data() + 1 + n, n);
    s.state.qddot = Eigen::Map<Vec>(fields.data() + 1 + 2 * n, n);
    s.tau = Eigen::Map<Vec>(fields.data() + 1 + 3 * n, n);
    samples.push_back(std::move(s));
  }
  if (dt_out) *dt_out = dt;
  return samples;
}

std::vector<DynSample> label_with_oracle(const RobotParams& plant,
                                         const DesiredTrajectory& traj) {
  std::vector<DynSample> samples;
  samples.reserve(traj.points.size());
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    DynSample s;
    s.t = static_cast<double>(i) * traj.dt;
    s.state = traj.points[i];
    s.tau = oracle_inverse_dynamics(plant, s.state);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace delan
