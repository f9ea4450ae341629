// Command-line front end: trains the structured and baseline inverse-dynamics
// models on simulated 2-link data and emits tidy CSV for plotting.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "delan/control.hpp"
#include "delan/experiments.hpp"
#include "delan/serialize.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace delan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration: JSON file with defaults; command-line flags override fields.

json default_config() {
  return json{
      {"experiment", "offline-characters"},
      {"models", {"delan", "ffnn"}},
      {"seeds", {0, 1, 2, 3, 4}},
      {"out", "results"},
      {"fd", 200.0},
      {"robot", json::object()},
      {"network",
       {{"hidden", {64, 64}},
        {"activation", "softplus"},
        {"diag_offset", 1e-2}}},
      {"train",
       {{"steps", 4000}, {"batch", 64}, {"lambda", 1e-4}, {"lr", 1e-3}}},
      {"characters",
       {{"count", 20}, {"train_sizes", {1, 6, 8, 10}}, {"train", 8}}},
      {"cosine",
       {{"amplitude", {0.5, 0.4}},
        {"frequency", {0.6, 0.9}},
        {"phase", {0.0, 1.2}},
        {"offset", {0.0, 1.2}},
        {"duration", 10.0}}},
      {"control",
       {{"kp", 5.0},
        {"kd", 0.5},
        {"control_rate", 500.0},
        {"feedforward_rate", 200.0},
        {"sim_dt", 1e-3},
        {"episodes", 5},
        {"async", false},
        {"train_steps_per_tick", 1}}},
      {"velocity_scales", {1.0, 1.25, 1.5, 1.75, 2.0}},
      {"noise_sigmas", {0.0, 0.01, 0.03, 0.1}},
      {"gradcheck", {{"configurations", 100}, {"tolerance", 1e-5}}},
  };
}

void merge_into(json& base, const json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) &&
        base[it.key()].is_object())
      merge_into(base[it.key()], *it);
    else
      base[it.key()] = *it;
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(cell, &pos));
      if (pos != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse list entry '" + cell + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

RobotParams robot_from_json(const json& j) {
  RobotParams p;
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  get("m1", p.m1);
  get("m2", p.m2);
  get("l1", p.l1);
  get("l2", p.l2);
  get("lc1", p.lc1);
  get("lc2", p.lc2);
  get("I1", p.I1);
  get("I2", p.I2);
  get("gravity", p.gravity);
  return p;
}

Activation activation_from_string(const std::string& name) {
  if (name == "softplus") return Activation::Softplus;
  if (name == "relu") return Activation::Relu;
  throw ConfigError("unknown activation '" + name + "'");
}

struct Settings {
  json cfg;
  RobotParams robot;
  DelanConfig delan;
  FfnnConfig ffnn;
  TrainOptions train;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> models;
  fs::path out;
  double fd = 200.0;
};

Settings resolve(const json& cfg) {
  Settings s;
  s.cfg = cfg;
  s.robot = robot_from_json(cfg.at("robot"));
  s.fd = cfg.at("fd").get<double>();
  if (!(s.fd > 0.0)) throw ConfigError("fd must be positive");

  const json& net = cfg.at("network");
  s.delan.n = 2;
  s.delan.hidden = net.at("hidden").get<std::vector<int>>();
  s.delan.activation =
      activation_from_string(net.at("activation").get<std::string>());
  s.delan.diag_offset = net.at("diag_offset").get<double>();
  s.ffnn.n = 2;
  s.ffnn.hidden = s.delan.hidden;
  s.ffnn.activation = s.delan.activation;

  const json& tr = cfg.at("train");
  s.train.steps = tr.at("steps").get<int>();
  s.train.batch = tr.at("batch").get<int>();
  s.train.lambda = tr.at("lambda").get<double>();
  s.train.adam.lr = tr.at("lr").get<double>();
  if (s.train.steps < 0 || s.train.batch < 1)
    throw ConfigError("train.steps must be >= 0 and train.batch >= 1");

  s.seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
  if (s.seeds.empty()) throw ConfigError("seeds must be nonempty");
  s.models = cfg.at("models").get<std::vector<std::string>>();
  if (s.models.empty()) throw ConfigError("models must be nonempty");
  for (const auto& m : s.models)
    if (m != "delan" && m != "ffnn" && m != "si" && m != "oracle" && m != "pd")
      throw ConfigError("unknown model '" + m + "'");
  s.out = cfg.at("out").get<std::string>();
  return s;
}

void write_sidecar(const Settings& s, const std::string& command) {
  fs::create_directories(s.out);
  json echo = s.cfg;
  echo["command"] = command;
  std::ofstream file(s.out / "config_echo.json");
  if (!file) throw ConfigError("cannot write to " + s.out.string());
  file << echo.dump(2) << "\n";
}

std::ofstream open_csv(const Settings& s, const std::string& name,
                       const std::string& header) {
  fs::create_directories(s.out);
  std::ofstream file(s.out / name);
  if (!file) throw ConfigError("cannot write to " + (s.out / name).string());
  file << header << "\n";
  file.precision(12);
  return file;
}

// ---------------------------------------------------------------------------
// Model handles shared by the offline and online commands.

TorquePredictor make_predictor(const std::string& model, const Settings& s,
                               const std::vector<DynSample>& train,
                               std::uint64_t seed) {
  if (model == "oracle") {
    RobotParams plant = s.robot;
    return [plant](const JointState& st) {
      return oracle_inverse_dynamics(plant, st);
    };
  }
  if (model == "pd")
    return [](const JointState& st) { return Vec::Zero(st.dof()); };
  if (model == "delan") {
    auto params = std::make_shared<DelanParams>(
        train_delan_offline(s.delan, train, seed, s.train));
    return [params](const JointState& st) {
      return inverse_dynamics(*params, st);
    };
  }
  if (model == "ffnn") {
    auto params = std::make_shared<FfnnParams>(
        train_ffnn_offline(s.ffnn, train, seed, s.train));
    return [params](const JointState& st) {
      return ffnn_predict(*params, st);
    };
  }
  if (model == "si") {
    auto fitted = std::make_shared<SiModel>(si_fit(s.robot, train));
    RobotParams geometry = s.robot;
    return [geometry, fitted](const JointState& st) {
      return si_predict(geometry, *fitted, st);
    };
  }
  throw ConfigError("unknown model '" + model + "'");
}

// ---------------------------------------------------------------------------
// offline: per-seed training and held-out MSE, optional noise sweep.

std::pair<std::vector<DynSample>, std::vector<DynSample>> cosine_split(
    const Settings& s) {
  const json& c = s.cfg.at("cosine");
  auto to_vec = [](const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()))
        .eval();
  };
  const Vec A = to_vec(c.at("amplitude")), f = to_vec(c.at("frequency"));
  const Vec phi = to_vec(c.at("phase")), off = to_vec(c.at("offset"));
  const double duration = c.at("duration").get<double>();
  const auto train = cosine_trajectory(A, f, phi, off, duration, 1.0, s.fd);
  const Vec phi_shift = phi.array() + 0.9;
  const auto test =
      cosine_trajectory(A, f, phi_shift, off, duration, 1.0, s.fd);
  return {label_with_oracle(s.robot, train), label_with_oracle(s.robot, test)};
}

int cmd_offline(const Settings& s) {
  write_sidecar(s, "offline");
  const std::string experiment = s.cfg.at("experiment").get<std::string>();
  auto csv = open_csv(s, "offline_mse.csv",
                      "experiment,model,n,sigma,seed,train_mse,test_mse");

  auto run_point = [&](const std::string& model, int n, double sigma,
                       std::uint64_t seed, const std::vector<DynSample>& train,
                       const std::vector<DynSample>& test) {
    const auto predictor = make_predictor(model, s, train, seed);
    const double train_mse = torque_mse(predictor, train);
    csv << experiment << ',' << model << ',' << n << ',' << sigma << ','
        << seed << ',' << train_mse << ',';
    if (test.empty()) {
      std::cerr << "warning: no held-out data for n=" << n
                << "; test column left empty\n";
    } else {
      csv << torque_mse(predictor, test);
    }
    csv << "\n";
    csv.flush();
  };

  if (experiment == "offline-cosine") {
    const auto [train, test] = cosine_split(s);
    for (const auto& model : s.models)
      for (const auto seed : s.seeds)
        run_point(model, 1, 0.0, seed, train, test);
    return kExitOk;
  }

  const json& chars = s.cfg.at("characters");
  const int count = chars.at("count").get<int>();
  const auto per_char = character_datasets(s.robot, count, s.fd);

  if (experiment == "noise-sweep") {
    const int n = chars.at("train").get<int>();
    const auto sigmas = s.cfg.at("noise_sigmas").get<std::vector<double>>();
    const Dataset ds = split_characters(per_char, n);
    for (const auto& model : s.models)
      for (const double sigma : sigmas)
        for (const auto seed : s.seeds) {
          const auto noisy = corrupt(ds.train, sigma, seed + 1);
          run_point(model, n, sigma, seed, noisy, ds.test);
        }
    return kExitOk;
  }

  if (experiment != "offline-characters")
    throw ConfigError("unknown offline experiment '" + experiment + "'");

  const auto sizes = chars.at("train_sizes").get<std::vector<int>>();
  for (const auto& model : s.models)
    for (const int n : sizes) {
      const Dataset ds = split_characters(per_char, n);
      for (const auto seed : s.seeds)
        run_point(model, n, 0.0, seed, ds.train, ds.test);
    }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// online: tracking control with interleaved learning, then frozen evaluation
// across velocity scales or held-out characters.

std::unique_ptr<OnlineLearner> make_learner(
    const std::string& model, const Settings& s, std::uint64_t seed,
    const std::vector<DesiredTrajectory>& schedule) {
  LearnerConfig lcfg;
  lcfg.batch_size = s.train.batch;
  lcfg.seed = seed;
  lcfg.lambda = s.train.lambda;
  lcfg.adam = s.train.adam;
  if (model == "delan") {
    DelanParams init = DelanParams::init(s.delan, seed);
    // input whitening from the known reference positions
    std::vector<DynSample> ref;
    for (const auto& traj : schedule)
      for (const auto& p : traj.points) {
        DynSample d;
        d.state = p;
        d.tau = Vec::Zero(p.dof());
        ref.push_back(std::move(d));
      }
    if (!ref.empty())
      fit_input_whitening(ref, init.norm_mean, init.norm_scale);
    return std::make_unique<DelanLearner>(init, lcfg);
  }
  if (model == "ffnn")
    return std::make_unique<FfnnLearner>(FfnnParams::init(s.ffnn, seed), lcfg);
  return nullptr;  // oracle/pd/si do not learn online
}

int cmd_online(const Settings& s) {
  write_sidecar(s, "online");
  const std::string experiment = s.cfg.at("experiment").get<std::string>();
  const json& ctl = s.cfg.at("control");
  const Gains gains = Gains::uniform(2, ctl.at("kp").get<double>(),
                                     ctl.at("kd").get<double>());
  LoopConfig loop;
  loop.control_rate = ctl.at("control_rate").get<double>();
  loop.feedforward_rate = ctl.at("feedforward_rate").get<double>();
  loop.sim_dt = ctl.at("sim_dt").get<double>();
  loop.train_steps_per_tick = ctl.at("train_steps_per_tick").get<int>();
  loop.snapshot_policy = ctl.at("async").get<bool>()
                             ? SnapshotPolicy::Asynchronous
                             : SnapshotPolicy::Synchronous;
  loop.online = true;
  const int episodes = ctl.at("episodes").get<int>();

  auto train_csv = open_csv(s, "online_training.csv",
                            "model,seed,episode,accumulated_error");
  auto eval_csv =
      open_csv(s, "online_eval.csv",
               "model,reference,seed,accumulated_error,realtime_violations");
  LoopConfig eval_loop = loop;
  eval_loop.online = false;

  auto evaluate = [&](const std::string& model,
                      const InverseModel& inverse, std::uint64_t seed,
                      const std::string& ref_name,
                      const DesiredTrajectory& traj) {
    const auto result = run_episode(s.robot, inverse, traj, gains, eval_loop);
    eval_csv << model << ',' << ref_name << ',' << seed << ','
             << result.report.accumulated << ','
             << result.report.realtime_violations << "\n";
    eval_csv.flush();
  };

  if (experiment == "online-characters") {
    const json& chars = s.cfg.at("characters");
    const int count = chars.at("count").get<int>();
    const int n_train = chars.at("train").get<int>();
    const auto set = synth_characters(count, s.robot);
    std::vector<DesiredTrajectory> schedule;
    for (int i = 0; i < n_train; ++i)
      schedule.push_back(character_to_joint(set[i], s.robot, s.fd));
    std::vector<DesiredTrajectory> repeated;
    for (int e = 0; e < episodes; ++e)
      repeated.insert(repeated.end(), schedule.begin(), schedule.end());

    for (const auto& model : s.models)
      for (const auto seed : s.seeds) {
        std::shared_ptr<const InverseModel> frozen;
        if (auto learner = make_learner(model, s, seed, repeated)) {
          const auto result =
              run_online(s.robot, *learner, repeated, gains, loop);
          for (std::size_t e = 0; e < result.reports.size(); ++e)
            train_csv << model << ',' << seed << ',' << e << ','
                      << result.reports[e].accumulated << "\n";
          frozen = result.model;
        } else if (model == "si") {
          // fit on the training characters' exact data
          std::vector<DynSample> data;
          for (const auto& traj : schedule) {
            const auto labelled = label_with_oracle(s.robot, traj);
            data.insert(data.end(), labelled.begin(), labelled.end());
          }
          frozen = std::make_shared<SiInverseModel>(s.robot,
                                                    si_fit(s.robot, data));
        } else if (model == "oracle") {
          frozen = std::make_shared<OracleModel>(s.robot);
        } else {
          frozen = std::make_shared<ZeroModel>(2);
        }
        for (int i = n_train; i < count; ++i)
          evaluate(model, *frozen, seed, set[i].name,
                   character_to_joint(set[i], s.robot, s.fd));
      }
    return kExitOk;
  }

  if (experiment != "online-cosine")
    throw ConfigError("unknown online experiment '" + experiment + "'");

  const json& c = s.cfg.at("cosine");
  auto to_vec = [](const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()))
        .eval();
  };
  const Vec A = to_vec(c.at("amplitude")), f = to_vec(c.at("frequency"));
  const Vec phi = to_vec(c.at("phase")), off = to_vec(c.at("offset"));
  const double duration = c.at("duration").get<double>();
  const auto scales = s.cfg.at("velocity_scales").get<std::vector<double>>();

  auto make_traj = [&](double scale) {
    return cosine_trajectory(A, f, phi, off, duration, scale, s.fd);
  };
  const std::vector<DesiredTrajectory> schedule(
      static_cast<std::size_t>(episodes), make_traj(1.0));

  for (const auto& model : s.models)
    for (const auto seed : s.seeds) {
      std::shared_ptr<const InverseModel> frozen;
      if (auto learner = make_learner(model, s, seed, schedule)) {
        const auto result = run_online(s.robot, *learner, schedule, gains,
                                       loop);
        for (std::size_t e = 0; e < result.reports.size(); ++e)
          train_csv << model << ',' << seed << ',' << e << ','
                    << result.reports[e].accumulated << "\n";
        frozen = result.model;
      } else if (model == "si") {
        frozen = std::make_shared<SiInverseModel>(
            s.robot,
            si_fit(s.robot, label_with_oracle(s.robot, make_traj(1.0))));
      } else if (model == "oracle") {
        frozen = std::make_shared<OracleModel>(s.robot);
      } else {
        frozen = std::make_shared<ZeroModel>(2);
      }
      for (const double scale : scales) {
        std::ostringstream name;
        name << "scale_" << scale;
        evaluate(model, *frozen, seed, name.str(), make_traj(scale));
      }
    }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// decompose: learned vs exact torque components on held-out glyphs.

int cmd_decompose(const Settings& s) {
  write_sidecar(s, "decompose");
  const json& chars = s.cfg.at("characters");
  const int count = chars.at("count").get<int>();
  const int n_train = chars.at("train").get<int>();
  const auto per_char = character_datasets(s.robot, count, s.fd);
  const Dataset ds = split_characters(per_char, n_train);
  if (ds.test.empty())
    throw ConfigError("decompose needs held-out characters (train < count)");

  const auto set = synth_characters(count, s.robot);
  const std::uint64_t seed = s.seeds.front();
  const DelanParams params =
      s.train.steps > 0
          ? train_delan_offline(s.delan, ds.train, seed, s.train)
          : DelanParams::init(s.delan, seed);
  save_model(to_json(params), (s.out / "decompose_model.json").string());

  auto rms = [](double sum_sq, int n) { return std::sqrt(sum_sq / n); };
  const int n_eval = std::min(3, count - n_train);
  for (int c = 0; c < n_eval; ++c) {
    const int idx = n_train + c;
    const auto& samples = per_char[static_cast<std::size_t>(idx)];
    auto csv = open_csv(
        s, "decompose_" + set[static_cast<std::size_t>(idx)].name + ".csv",
        "t,joint,learned_inertial,learned_velocity,learned_gravity,"
        "learned_total,exact_inertial,exact_velocity,exact_gravity,"
        "exact_total");
    double err_in = 0.0, err_vel = 0.0, err_g = 0.0;
    double ref_in = 0.0, ref_vel = 0.0, ref_g = 0.0;
    for (const auto& sample : samples) {
      const auto learned = decompose(params, sample.state);
      const Vec exact_in = mass_matrix(s.robot, sample.state.q) *
                           sample.state.qddot;
      const Vec exact_vel =
          coriolis_vector(s.robot, sample.state.q, sample.state.qdot);
      const Vec exact_g = gravity_vector(s.robot, sample.state.q);
      for (int j = 0; j < 2; ++j) {
        csv << sample.t << ',' << j << ',' << learned.inertial[j] << ','
            << learned.coriolis[j] << ',' << learned.gravity[j] << ','
            << (learned.inertial[j] + learned.coriolis[j] +
                learned.gravity[j])
            << ',' << exact_in[j] << ',' << exact_vel[j] << ',' << exact_g[j]
            << ',' << (exact_in[j] + exact_vel[j] + exact_g[j]) << "\n";
      }
      err_in += (learned.inertial - exact_in).squaredNorm();
      err_vel += (learned.coriolis - exact_vel).squaredNorm();
      err_g += (learned.gravity - exact_g).squaredNorm();
      ref_in += exact_in.squaredNorm();
      ref_vel += exact_vel.squaredNorm();
      ref_g += exact_g.squaredNorm();
    }
    const int n = static_cast<int>(samples.size());
    std::cout << "character " << set[static_cast<std::size_t>(idx)].name
              << ": relative component RMSE inertial="
              << rms(err_in, n) / std::max(rms(ref_in, n), 1e-12)
              << " velocity="
              << rms(err_vel, n) / std::max(rms(ref_vel, n), 1e-12)
              << " gravity="
              << rms(err_g, n) / std::max(rms(ref_g, n), 1e-12) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck: analytic derivatives against finite differences.

int cmd_gradcheck(const Settings& s) {
  write_sidecar(s, "gradcheck");
  const json& gc = s.cfg.at("gradcheck");
  const int configs = gc.at("configurations").get<int>();
  const double tol = gc.at("tolerance").get<double>();

  DelanConfig cfg = s.delan;
  cfg.hidden = {16, 16};  // small trunk keeps the sweep fast
  std::mt19937_64 rng(s.seeds.front());
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  auto rand_vec = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
  };

  const double h = 1e-6;
  double max_dldq = 0.0, max_dhdt = 0.0, max_quad = 0.0, max_loss = 0.0;
  for (int trial = 0; trial < configs; ++trial) {
    const DelanParams params =
        DelanParams::init(cfg, static_cast<std::uint64_t>(trial));
    const Vec q = rand_vec(2), qd = rand_vec(2);

    const auto heads = network_heads(params, q);
    const auto eval = evaluate(params, q, qd);
    for (int j = 0; j < 2; ++j) {
      Vec qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const auto hp = network_heads(params, qp);
      const auto hm = network_heads(params, qm);
      for (Eigen::Index i = 0; i < heads.l_d.size(); ++i) {
        const double fd = (hp.l_d[i] - hm.l_d[i]) / (2.0 * h);
        max_dldq = std::max(
            max_dldq, std::abs(heads.dld_dq(i, j) - fd) /
                          std::max({1.0, std::abs(fd),
                                    std::abs(heads.dld_dq(i, j))}));
      }
      const double fq = (qd.dot(evaluate(params, qp, qd).H * qd) -
                         qd.dot(evaluate(params, qm, qd).H * qd)) /
                        (2.0 * h);
      max_quad = std::max(max_quad,
                          std::abs(eval.quad_dq[j] - fq) /
                              std::max({1.0, std::abs(fq),
                                        std::abs(eval.quad_dq[j])}));
    }
    const Mat fd_H = (evaluate(params, q + h * qd, qd).H -
                      evaluate(params, q - h * qd, qd).H) /
                     (2.0 * h);
    for (int r = 0; r < 2; ++r)
      for (int c2 = 0; c2 < 2; ++c2)
        max_dhdt = std::max(max_dhdt,
                            std::abs(eval.dH_dt(r, c2) - fd_H(r, c2)) /
                                std::max({1.0, std::abs(fd_H(r, c2)),
                                          std::abs(eval.dH_dt(r, c2))}));

    if (trial < 10) {  // full loss-gradient check on a subset (it is O(P^2))
      std::vector<DynSample> batch(2);
      for (auto& b : batch) {
        b.state = {rand_vec(2), rand_vec(2), rand_vec(2)};
        b.tau = rand_vec(2);
      }
      DelanParams probe = params;
      const auto [loss, grads] = loss_and_gradient(probe, batch, 1e-4);
      (void)loss;
      std::size_t g = 0;
      auto check_block = [&](auto& m) {
        for (Eigen::Index k = 0; k < m.size(); ++k) {
          const double orig = m.data()[k];
          m.data()[k] = orig + h;
          const double lp = loss_and_gradient(probe, batch, 1e-4).first;
          m.data()[k] = orig - h;
          const double lm = loss_and_gradient(probe, batch, 1e-4).first;
          m.data()[k] = orig;
          const double fd = (lp - lm) / (2.0 * h);
          max_loss = std::max(
              max_loss, std::abs(grads[g].data()[k] - fd) /
                            std::max({1.0, std::abs(fd),
                                      std::abs(grads[g].data()[k])}));
        }
        ++g;
      };
      for (auto& layer : probe.trunk) {
        check_block(layer.W);
        check_block(layer.b);
      }
      for (auto* head : {&probe.head_ld, &probe.head_lo, &probe.head_g}) {
        check_block(head->W);
        check_block(head->b);
      }
    }
  }

  std::cout << "configurations: " << configs << "\n"
            << "max relative error, head Jacobian dl/dq:   " << max_dldq
            << "\n"
            << "max relative error, dH/dt:                 " << max_dhdt
            << "\n"
            << "max relative error, qd'(dH/dq_i)qd:        " << max_quad
            << "\n"
            << "max relative error, full loss gradient:    " << max_loss
            << "\n"
            << "tolerance: " << tol << "\n";
  const double worst = std::max({max_dldq, max_dhdt, max_quad, max_loss});
  if (!(worst < tol)) {
    std::cout << "FAIL: worst error " << worst << " >= " << tol << "\n";
    return kExitValidation;
  }
  std::cout << "PASS\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured inverse-dynamics learning on a simulated 2-link "
               "arm: training, control, and evaluation experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, model_override;
  std::vector<std::uint64_t> seed_override;
  std::string velocity_scales, noise_sigmas;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--seed", seed_override, "random seed (repeatable)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--model", model_override,
                    "model to run: delan|ffnn|si|oracle|pd");
    cmd->add_option("--velocity-scales", velocity_scales,
                    "comma-separated velocity scales");
    cmd->add_option("--noise-sigmas", noise_sigmas,
                    "comma-separated noise standard deviations");
  };

  auto* offline = app.add_subcommand(
      "offline", "train per seed and report train/test torque MSE");
  auto* online = app.add_subcommand(
      "online", "tracking control with interleaved learning");
  auto* decomp = app.add_subcommand(
      "decompose", "learned vs exact torque components on held-out glyphs");
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "analytic derivatives against finite differences");
  for (auto* cmd : {offline, online, decomp, gradcheck}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    json cfg = default_config();
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw ConfigError("cannot open config " + config_path);
      json loaded;
      try {
        file >> loaded;
      } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
      }
      merge_into(cfg, loaded);
    }
    if (!seed_override.empty()) cfg["seeds"] = seed_override;
    if (!out_dir.empty()) cfg["out"] = out_dir;
    if (!model_override.empty())
      cfg["models"] = std::vector<std::string>{model_override};
    if (!velocity_scales.empty())
      cfg["velocity_scales"] = parse_list(velocity_scales);
    if (!noise_sigmas.empty()) cfg["noise_sigmas"] = parse_list(noise_sigmas);

    const Settings settings = resolve(cfg);
    if (offline->parsed()) return cmd_offline(settings);
    if (online->parsed()) return cmd_online(settings);
    if (decomp->parsed()) return cmd_decompose(settings);
    return cmd_gradcheck(settings);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
