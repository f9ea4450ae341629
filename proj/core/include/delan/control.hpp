#ifndef DELAN_CONTROL_HPP_
#define DELAN_CONTROL_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "delan/baselines.hpp"
#include "delan/model.hpp"
#include "delan/robot.hpp"
#include "delan/trajectory.hpp"
#include "delan/types.hpp"

namespace delan {

struct Gains {
  Vec kp;  // [N m / rad]
  Vec kd;  // [N m s / rad]

  static Gains uniform(int n, double kp, double kd) {
    return {Vec::Constant(n, kp), Vec::Constant(n, kd)};
  }
};

enum class SnapshotPolicy { Synchronous, Asynchronous };

struct LoopConfig {
  double control_rate = 500.0;      // fc [Hz]
  double feedforward_rate = 200.0;  // fd [Hz]
  double sim_dt = 1e-3;             // plant integration step [s]
  bool online = false;
  SnapshotPolicy snapshot_policy = SnapshotPolicy::Synchronous;
  double realtime_budget = 1.0 / 200.0;  // [s] per feed-forward evaluation
  int train_steps_per_tick = 1;          // synchronous online mode
};

struct TrackingReport {
  Vec per_joint_mse;
  double accumulated = 0.0;            // sum over joints of per-joint MSE
  std::vector<Vec> per_point_errors;   // q - q_d at the fd sampling points
  int realtime_violations = 0;
};

// tau = Kp (q_d - q) + Kd (qd_d - qd) + tau_ff
Vec control_law(const Vec& q, const Vec& qdot, const Vec& q_d,
                const Vec& qd_d, const Vec& tau_ff, const Gains& gains);

TrackingReport tracking_mse(const std::vector<Vec>& executed_q,
                            const DesiredTrajectory& desired);

// An immutable inverse-model snapshot; safe to share across threads.
class InverseModel {
 public:
  virtual ~InverseModel() = default;
  virtual Vec feedforward(const JointState& desired) const = 0;
};

// A model that learns from the control loop's sample stream. snapshot() is
// thread-safe; add_sample/train belong to the trainer role.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  virtual void add_sample(const DynSample& sample) = 0;
  virtual void train(int steps) = 0;
  virtual std::shared_ptr<const InverseModel> snapshot() const = 0;
  virtual bool halted() const = 0;  // training hit a non-finite loss
};

// --- ready-made model handles ---------------------------------------------

class ZeroModel final : public InverseModel {  // PD-only baseline
 public:
  explicit ZeroModel(int n) : n_(n) {}
  Vec feedforward(const JointState&) const override { return Vec::Zero(n_); }

 private:
  int n_;
};

class OracleModel final : public InverseModel {
 public:
  explicit OracleModel(const RobotParams& p) : p_(p) {}
  Vec feedforward(const JointState& d) const override {
    return oracle_inverse_dynamics(p_, d);
  }

 private:
  RobotParams p_;
};

class DelanModel final : public InverseModel {
 public:
  explicit DelanModel(DelanParams params) : params_(std::move(params)) {}
  Vec feedforward(const JointState& d) const override {
    return inverse_dynamics(params_, d);
  }
  const DelanParams& params() const { return params_; }

 private:
  DelanParams params_;
};

class FfnnModel final : public InverseModel {
 public:
  explicit FfnnModel(FfnnParams params) : params_(std::move(params)) {}
  Vec feedforward(const JointState& d) const override {
    return ffnn_predict(params_, d);
  }
  const FfnnParams& params() const { return params_; }

 private:
  FfnnParams params_;
};

class SiInverseModel final : public InverseModel {
 public:
  SiInverseModel(const RobotParams& geometry, SiModel model)
      : geometry_(geometry), model_(std::move(model)) {}
  Vec feedforward(const JointState& d) const override {
    return si_predict(geometry_, model_, d);
  }

 private:
  RobotParams geometry_;
  SiModel model_;
};

// --- online learners --------------------------------------------------------

struct LearnerConfig {
  int batch_size = 32;
  std::uint64_t seed = 0;
  double lambda = 1e-4;
  AdamConfig adam = {};
};

class DelanLearner final : public OnlineLearner {
 public:
  DelanLearner(const DelanParams& init, LearnerConfig cfg = {});
  void add_sample(const DynSample& sample) override;
  void train(int steps) override;
  std::shared_ptr<const InverseModel> snapshot() const override;
  bool halted() const override { return halted_; }
  DelanParams params() const { return trainer_.params(); }

 private:
  void publish();
  LearnerConfig cfg_;
  DelanTrainer trainer_;
  std::vector<DynSample> buffer_;
  std::mt19937_64 rng_;
  bool halted_ = false;
  mutable std::mutex mutex_;
  std::shared_ptr<const InverseModel> snapshot_;
};

class FfnnLearner final : public OnlineLearner {
 public:
  FfnnLearner(const FfnnParams& init, LearnerConfig cfg = {});
  void add_sample(const DynSample& sample) override;
  void train(int steps) override;
  std::shared_ptr<const InverseModel> snapshot() const override;
  bool halted() const override { return halted_; }
  FfnnParams params() const { return trainer_.params(); }

 private:
  void publish();
  LearnerConfig cfg_;
  FfnnTrainer trainer_;
  std::vector<DynSample> buffer_;
  std::mt19937_64 rng_;
  bool halted_ = false;
  mutable std::mutex mutex_;
  std::shared_ptr<const InverseModel> snapshot_;
};

// --- episode execution ------------------------------------------------------

struct EpisodeResult {
  TrackingReport report;
  std::vector<DynSample> samples;  // measured (q, qd, qdd, tau) at fd
};

// Simulates the plant under the PD + feed-forward law; torque is held
// between control updates (zero-order hold), the feed-forward term is
// refreshed at fd from the desired states.
EpisodeResult run_episode(const RobotParams& plant, const InverseModel& model,
                          const DesiredTrajectory& traj, const Gains& gains,
                          const LoopConfig& cfg);

struct OnlineResult {
  std::vector<TrackingReport> reports;  // one per episode
  std::shared_ptr<const InverseModel> model;
};

// Interleaves episode execution with training. Synchronous mode runs
// cfg.train_steps_per_tick deterministic steps at every feed-forward tick;
// asynchronous mode runs the trainer on a worker thread fed by a bounded
// sample queue and adopts published snapshots between feed-forward updates.
OnlineResult run_online(const RobotParams& plant, OnlineLearner& learner,
                        const std::vector<DesiredTrajectory>& schedule,
                        const Gains& gains, const LoopConfig& cfg);

}  // namespace delan

#endif  // DELAN_CONTROL_HPP_
