#include "delan/control.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <functional>
#include <thread>

namespace delan {

Vec control_law(const Vec& q, const Vec& qdot, const Vec& q_d,
                const Vec& qd_d, const Vec& tau_ff, const Gains& gains) {
  if (q.size() != q_d.size() || qdot.size() != qd_d.size() ||
      q.size() != tau_ff.size() || gains.kp.size() != q.size() ||
      gains.kd.size() != q.size())
    throw ShapeError("control: shape mismatch in control law");
  return gains.kp.cwiseProduct(q_d - q) + gains.kd.cwiseProduct(qd_d - qdot) +
         tau_ff;
}

TrackingReport tracking_mse(const std::vector<Vec>& executed_q,
                            const DesiredTrajectory& desired) {
  if (executed_q.size() != desired.points.size())
    throw ShapeError("control: executed/desired length mismatch (" +
                     std::to_string(executed_q.size()) + " vs " +
                     std::to_string(desired.points.size()) + ")");
  if (executed_q.empty()) throw ShapeError("control: empty trajectory");
  const int n = static_cast<int>(executed_q.front().size());
  TrackingReport report;
  report.per_joint_mse = Vec::Zero(n);
  for (std::size_t k = 0; k < executed_q.size(); ++k) {
    const Vec err = executed_q[k] - desired.points[k].q;
    report.per_point_errors.push_back(err);
    report.per_joint_mse += err.cwiseProduct(err);
  }
  report.per_joint_mse /= static_cast<double>(executed_q.size());
  report.accumulated = report.per_joint_mse.sum();
  return report;
}

namespace {

using ModelProvider = std::function<std::shared_ptr<const InverseModel>()>;
using TickHook = std::function<void(const DynSample&)>;

EpisodeResult execute_episode(const RobotParams& plant,
                              const ModelProvider& provider,
                              const DesiredTrajectory& traj,
                              const Gains& gains, const LoopConfig& cfg,
                              const TickHook& hook) {
  if (traj.points.empty()) throw ShapeError("control: empty trajectory");
  if (cfg.control_rate < cfg.feedforward_rate)
    throw ShapeError("control: control rate must be >= feed-forward rate");
  if (cfg.sim_dt > 1.0 / cfg.control_rate + 1e-12)
    throw ShapeError("control: sim_dt must not exceed the control period");
  if (std::abs(traj.dt * cfg.feedforward_rate - 1.0) > 1e-9)
    throw ShapeError("control: trajectory must be sampled at fd");

  const int n = traj.points.front().dof();
  const double eps = 1e-9;
  const double duration = (traj.points.size() - 1) * traj.dt;
  const int steps = static_cast<int>(std::llround(duration / cfg.sim_dt));

  Vec q = traj.points.front().q;
  Vec qdot = traj.points.front().qdot;
  JointState desired = traj.points.front();
  Vec tau_ff = Vec::Zero(n);
  Vec tau = Vec::Zero(n);

  std::size_t ff_idx = 0;
  int ctrl_idx = 0;
  std::vector<Vec> executed_q;
  EpisodeResult result;

  for (int k = 0; k <= steps; ++k) {
    const double t = k * cfg.sim_dt;

    bool ff_tick = false;
    if (ff_idx < traj.points.size() &&
        t + eps >= static_cast<double>(ff_idx) * traj.dt) {
      desired = traj.points[ff_idx];
      auto model = provider();
      const auto t0 = std::chrono::steady_clock::now();
      tau_ff = model->feedforward(desired);
      const auto t1 = std::chrono::steady_clock::now();
      if (std::chrono::duration<double>(t1 - t0).count() >
          cfg.realtime_budget)
        ++result.report.realtime_violations;
      ff_tick = true;
    }
    if (t + eps >= static_cast<double>(ctrl_idx) / cfg.control_rate) {
      tau = control_law(q, qdot, desired.q, desired.qdot, tau_ff, gains);
      ++ctrl_idx;
    }
    if (ff_tick) {
      executed_q.push_back(q);
      DynSample sample;
      sample.t = t;
      sample.state.q = q;
      sample.state.qdot = qdot;
      sample.state.qddot = oracle_forward_dynamics(plant, q, qdot, tau);
      sample.tau = tau;
      result.samples.push_back(sample);
      if (hook) hook(result.samples.back());
      ++ff_idx;
    }
    if (k < steps) {
      const RobotState next = step(plant, q, qdot, tau, cfg.sim_dt);
      q = next.q;
      qdot = next.qdot;
    }
  }

  const int violations = result.report.realtime_violations;
  result.report = tracking_mse(executed_q, traj);
  result.report.realtime_violations = violations;
  return result;
}

// Bounded sample channel for the asynchronous trainer; drops the oldest
// sample on overflow so the controller never blocks.
class SampleQueue {
 public:
  explicit SampleQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(const DynSample& s) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (queue_.size() >= capacity_) queue_.pop_front();
    queue_.push_back(s);
  }

  std::vector<DynSample> drain() {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<DynSample> out(queue_.begin(), queue_.end());
    queue_.clear();
    return out;
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::deque<DynSample> queue_;
};

}  // namespace

EpisodeResult run_episode(const RobotParams& plant, const InverseModel& model,
                          const DesiredTrajectory& traj, const Gains& gains,
                          const LoopConfig& cfg) {
  // non-owning provider: the caller keeps the model alive
  auto provider = [&model]() {
    return std::shared_ptr<const InverseModel>(&model,
                                               [](const InverseModel*) {});
  };
  return execute_episode(plant, provider, traj, gains, cfg, nullptr);
}

OnlineResult run_online(const RobotParams& plant, OnlineLearner& learner,
                        const std::vector<DesiredTrajectory>& schedule,
                        const Gains& gains, const LoopConfig& cfg) {
  OnlineResult result;

  if (cfg.snapshot_policy == SnapshotPolicy::Synchronous) {
    auto provider = [&learner]() { return learner.snapshot(); };
    for (const DesiredTrajectory& traj : schedule) {
      auto hook = [&](const DynSample& s) {
        learner.add_sample(s);
        if (!learner.halted() && cfg.train_steps_per_tick > 0)
          learner.train(cfg.train_steps_per_tick);
      };
      EpisodeResult ep = execute_episode(plant, provider, traj, gains, cfg,
                                         hook);
      result.reports.push_back(std::move(ep.report));
    }
  } else {
    SampleQueue queue(4096);
    std::atomic<bool> done{false};
    std::thread trainer([&]() {
      while (!done.load(std::memory_order_acquire)) {
        const std::vector<DynSample> batch = queue.drain();
        for (const DynSample& s : batch) learner.add_sample(s);
        if (!learner.halted())
          learner.train(std::max(1, cfg.train_steps_per_tick));
        if (batch.empty())
          std::this_thread::sleep_for(std::chrono::microseconds(200));
      }
    });
    auto provider = [&learner]() { return learner.snapshot(); };
    auto hook = [&](const DynSample& s) { queue.push(s); };
    for (const DesiredTrajectory& traj : schedule) {
      EpisodeResult ep = execute_episode(plant, provider, traj, gains, cfg,
                                         hook);
      result.reports.push_back(std::move(ep.report));
    }
    done.store(true, std::memory_order_release);
    trainer.join();
  }

  result.model = learner.snapshot();
  return result;
}

DelanLearner::DelanLearner(const DelanParams& init, LearnerConfig cfg)
    : cfg_(cfg),
      trainer_(init, cfg.lambda, cfg.adam),
      rng_(cfg.seed),
      snapshot_(std::make_shared<DelanModel>(init)) {}

void DelanLearner::add_sample(const DynSample& sample) {
  buffer_.push_back(sample);
}

void DelanLearner::train(int steps) {
  if (halted_ || buffer_.empty()) return;
  try {
    for (int s = 0; s < steps; ++s) {
      std::vector<DynSample> batch;
      const int b = std::min<int>(cfg_.batch_size,
                                  static_cast<int>(buffer_.size()));
      std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);
      for (int i = 0; i < b; ++i) batch.push_back(buffer_[pick(rng_)]);
      trainer_.train_step(batch);
    }
    publish();
  } catch (const NumericError&) {
    halted_ = true;  // control keeps running on the last snapshot
  }
}

void DelanLearner::publish() {
  auto snap = std::make_shared<DelanModel>(trainer_.params());
  std::lock_guard<std::mutex> lock(mutex_);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const InverseModel> DelanLearner::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return snapshot_;
}

FfnnLearner::FfnnLearner(const FfnnParams& init, LearnerConfig cfg)
    : cfg_(cfg),
      trainer_(init, cfg.lambda, cfg.adam),
      rng_(cfg.seed),
      snapshot_(std::make_shared<FfnnModel>(init)) {}

void FfnnLearner::add_sample(const DynSample& sample) {
  buffer_.push_back(sample);
}

void FfnnLearner::train(int steps) {
  if (halted_ || buffer_.empty()) return;
  try {
    for (int s = 0; s < steps; ++s) {
      std::vector<DynSample> batch;
      const int b = std::min<int>(cfg_.batch_size,
                                  static_cast<int>(buffer_.size()));
      std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);
      for (int i = 0; i < b; ++i) batch.push_back(buffer_[pick(rng_)]);
      trainer_.train_step(batch);
    }
    publish();
  } catch (const NumericError&) {
    halted_ = true;
  }
}

void FfnnLearner::publish() {
  auto snap = std::make_shared<FfnnModel>(trainer_.params());
  std::lock_guard<std::mutex> lock(mutex_);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const InverseModel> FfnnLearner::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return snapshot_;
}

}  // namespace delan
