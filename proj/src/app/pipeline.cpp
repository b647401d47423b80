#include "eqf_rio/app/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include "json.hpp"
#include <thread>

namespace eqf_rio {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

SO3 from_rpy(const Vector3d& rpy) { return SO3::rot_z(rpy.z()) * SO3::rot_y(rpy.y()) * SO3::rot_x(rpy.x()); }

const std::set<std::string>& sim_keys() {
  static const std::set<std::string> keys = {
      "trajectory.preset", "trajectory.duration", "trajectory.center", "trajectory.amplitude",
      "trajectory.frequency", "trajectory.phase", "trajectory.linear_velocity", "trajectory.euler_offset",
      "trajectory.euler_amplitude", "trajectory.euler_frequency", "trajectory.euler_phase", "sim.imu_rate",
      "sim.radar_rate", "sim.gyro_noise", "sim.accel_noise", "sim.gyro_bias_walk", "sim.accel_bias_walk",
      "sim.gyro_bias_sigma", "sim.accel_bias_sigma", "sim.sigma_kappa", "sim.sigma_rho", "sim.sigma_vd",
      "sim.landmark_count", "sim.landmark_half_extent", "sim.fov_half_angle_deg", "sim.max_range",
      "sim.min_range", "sim.mismatch_rate", "sim.seed", "sim.extrinsic_rpy_deg", "sim.extrinsic_translation"};
  return keys;
}

const std::set<std::string>& run_keys() {
  static const std::set<std::string> keys = {
      "noise.gyro", "noise.accel", "noise.gyro_bias_walk", "noise.accel_bias_walk", "noise.calib_rot_walk",
      "noise.calib_trans_walk", "radar.sigma_kappa", "radar.sigma_rho", "radar.sigma_vd", "radar.sigma_omega",
      "init.sigma.attitude", "init.sigma.velocity", "init.sigma.position", "init.sigma.gyro_bias",
      "init.sigma.accel_bias", "init.sigma.virtual_bias", "init.sigma.calib_rot", "init.sigma.calib_trans",
      "init.bias_from_groundtruth", "init.extrinsic_rpy_deg", "init.extrinsic_translation", "perturb",
      "filter.k_max", "filter.dt_max", "filter.gate_doppler", "filter.gate_msc", "filter.gate_threshold",
      "filter.doppler", "filter.msc", "seed"};
  return keys;
}

SystemState perturb_physical(const SystemState& xi, const Eigen::Matrix<double, 24, 1>& x) {
  SystemState out = xi;
  out.T = SE23(SO3::exp(x.segment<3>(0)) * xi.T.rotation(), xi.T.velocity() + x.segment<3>(3),
               xi.T.position() + x.segment<3>(6));
  out.b = xi.b + x.segment<9>(9);
  out.L = SE3(xi.L.rotation() * SO3::exp(x.segment<3>(18)), xi.L.translation() + x.segment<3>(21));
  return out;
}

EstimateRecord make_record(const FilterBelief& belief, double t) {
  const SystemState xi = belief.state();
  EstimateRecord r;
  r.t = t;
  r.T = xi.T;
  r.b = xi.b;
  r.L = xi.L;
  Matrix6d S;
  S.block<3, 3>(0, 0) = belief.Sigma.block<3, 3>(0, 0);
  S.block<3, 3>(0, 3) = belief.Sigma.block<3, 3>(0, 6);
  S.block<3, 3>(3, 0) = belief.Sigma.block<3, 3>(6, 0);
  S.block<3, 3>(3, 3) = belief.Sigma.block<3, 3>(6, 6);
  r.pose_covariance = ape_covariance(xi.T, S);
  return r;
}

}  // namespace

SimSpec load_sim_spec(const KeyValueFile& f) {
  f.reject_unknown(sim_keys());
  SimSpec spec;
  const std::string preset = f.get_string("trajectory.preset", "excited");
  const double duration = f.get_double("trajectory.duration", 60.0);
  try {
    spec.trajectory = TrajectorySpec::from_preset(preset, duration);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  TrajectorySpec& t = spec.trajectory;
  t.center = f.get_vec3("trajectory.center", t.center);
  t.amplitude = f.get_vec3("trajectory.amplitude", t.amplitude);
  t.frequency = f.get_vec3("trajectory.frequency", t.frequency);
  t.phase = f.get_vec3("trajectory.phase", t.phase);
  t.linear_velocity = f.get_vec3("trajectory.linear_velocity", t.linear_velocity);
  t.euler_offset = f.get_vec3("trajectory.euler_offset", t.euler_offset);
  t.euler_amplitude = f.get_vec3("trajectory.euler_amplitude", t.euler_amplitude);
  t.euler_frequency = f.get_vec3("trajectory.euler_frequency", t.euler_frequency);
  t.euler_phase = f.get_vec3("trajectory.euler_phase", t.euler_phase);

  SimConfig& s = spec.sim;
  s.imu_rate = f.get_double("sim.imu_rate", s.imu_rate);
  s.radar_rate = f.get_double("sim.radar_rate", s.radar_rate);
  s.gyro_noise = f.get_double("sim.gyro_noise", s.gyro_noise);
  s.accel_noise = f.get_double("sim.accel_noise", s.accel_noise);
  s.gyro_bias_walk = f.get_double("sim.gyro_bias_walk", s.gyro_bias_walk);
  s.accel_bias_walk = f.get_double("sim.accel_bias_walk", s.accel_bias_walk);
  s.gyro_bias_sigma = f.get_double("sim.gyro_bias_sigma", s.gyro_bias_sigma);
  s.accel_bias_sigma = f.get_double("sim.accel_bias_sigma", s.accel_bias_sigma);
  s.sigma_kappa = f.get_double("sim.sigma_kappa", s.sigma_kappa);
  s.sigma_rho = f.get_double("sim.sigma_rho", s.sigma_rho);
  s.sigma_vd = f.get_double("sim.sigma_vd", s.sigma_vd);
  s.landmark_count = f.get_int("sim.landmark_count", s.landmark_count);
  s.landmark_half_extent = f.get_vec3("sim.landmark_half_extent", s.landmark_half_extent);
  s.fov_half_angle = f.get_double("sim.fov_half_angle_deg", s.fov_half_angle / kDegToRad) * kDegToRad;
  s.max_range = f.get_double("sim.max_range", s.max_range);
  s.min_range = f.get_double("sim.min_range", s.min_range);
  s.mismatch_rate = f.get_double("sim.mismatch_rate", s.mismatch_rate);
  s.seed = static_cast<std::uint64_t>(f.get_int("sim.seed", static_cast<int>(s.seed)));
  if (f.has("sim.extrinsic_rpy_deg") || f.has("sim.extrinsic_translation")) {
    const Vector3d rpy = f.get_vec3("sim.extrinsic_rpy_deg", Vector3d::Zero()) * kDegToRad;
    s.extrinsic = SE3(from_rpy(rpy), f.get_vec3("sim.extrinsic_translation", s.extrinsic.translation()));
  }
  try {
    t.validate();
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

CalibPerturbation parse_perturbation(const std::string& text) {
  CalibPerturbation p;
  p.label = text;
  if (text.empty() || text == "none") {
    p.label = "none";
    return p;
  }
  const auto colon = text.find(':');
  if (colon != 1) throw ConfigError("bad perturbation '" + text + "', expected e.g. y:80deg");
  switch (text[0]) {
    case 'x': p.axis = Vector3d::UnitX(); break;
    case 'y': p.axis = Vector3d::UnitY(); break;
    case 'z': p.axis = Vector3d::UnitZ(); break;
    default: throw ConfigError("bad perturbation axis in '" + text + "'");
  }
  std::string value = text.substr(2);
  double scale = kDegToRad;
  if (value.size() > 3 && value.substr(value.size() - 3) == "deg") {
    value.resize(value.size() - 3);
  } else if (value.size() > 3 && value.substr(value.size() - 3) == "rad") {
    value.resize(value.size() - 3);
    scale = 1.0;
  }
  try {
    std::size_t pos = 0;
    p.angle = std::stod(value, &pos) * scale;
    if (pos != value.size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw ConfigError("bad perturbation angle in '" + text + "'");
  }
  return p;
}

RunConfig load_run_config(const KeyValueFile& f) {
  f.reject_unknown(run_keys());
  RunConfig c;
  c.gyro_noise = f.get_double("noise.gyro", c.gyro_noise);
  c.accel_noise = f.get_double("noise.accel", c.accel_noise);
  c.gyro_bias_walk = f.get_double("noise.gyro_bias_walk", c.gyro_bias_walk);
  c.accel_bias_walk = f.get_double("noise.accel_bias_walk", c.accel_bias_walk);
  c.calib_rot_walk = f.get_double("noise.calib_rot_walk", c.calib_rot_walk);
  c.calib_trans_walk = f.get_double("noise.calib_trans_walk", c.calib_trans_walk);

  DopplerNoiseSpec& r = c.filter.radar_noise;
  r.sigma_kappa = f.get_double("radar.sigma_kappa", r.sigma_kappa);
  r.sigma_rho = f.get_double("radar.sigma_rho", r.sigma_rho);
  r.sigma_vd = f.get_double("radar.sigma_vd", r.sigma_vd);
  if (f.has("radar.sigma_omega")) c.sigma_omega = f.get_double("radar.sigma_omega", 0.0);

  InitSigmas& s = c.sigma;
  s.attitude = f.get_double("init.sigma.attitude", s.attitude);
  s.velocity = f.get_double("init.sigma.velocity", s.velocity);
  s.position = f.get_double("init.sigma.position", s.position);
  s.gyro_bias = f.get_double("init.sigma.gyro_bias", s.gyro_bias);
  s.accel_bias = f.get_double("init.sigma.accel_bias", s.accel_bias);
  s.virtual_bias = f.get_double("init.sigma.virtual_bias", s.virtual_bias);
  s.calib_rot = f.get_double("init.sigma.calib_rot", s.calib_rot);
  s.calib_trans = f.get_double("init.sigma.calib_trans", s.calib_trans);

  c.init_bias_from_groundtruth = f.get_bool("init.bias_from_groundtruth", c.init_bias_from_groundtruth);
  if (f.has("init.extrinsic_rpy_deg") || f.has("init.extrinsic_translation")) {
    c.init_extrinsic = SE3(from_rpy(f.get_vec3("init.extrinsic_rpy_deg", Vector3d::Zero()) * kDegToRad),
                           f.get_vec3("init.extrinsic_translation", Vector3d::Zero()));
  }
  c.perturbation = parse_perturbation(f.get_string("perturb", "none"));

  c.filter.k_max = f.get_int("filter.k_max", c.filter.k_max);
  c.filter.dt_max = f.get_double("filter.dt_max", c.filter.dt_max);
  c.filter.gate_doppler = f.get_bool("filter.gate_doppler", c.filter.gate_doppler);
  c.filter.gate_msc = f.get_bool("filter.gate_msc", c.filter.gate_msc);
  c.filter.gate_threshold = f.get_double("filter.gate_threshold", c.filter.gate_threshold);
  c.use_doppler = f.get_bool("filter.doppler", c.use_doppler);
  c.use_msc = f.get_bool("filter.msc", c.use_msc);
  c.seed = static_cast<std::uint64_t>(f.get_int("seed", static_cast<int>(c.seed)));

  if (c.filter.k_max < 1) throw ConfigError("filter.k_max must be at least 1");
  if (!(c.filter.dt_max > 0.0)) throw ConfigError("filter.dt_max must be positive");
  for (double v : {c.gyro_noise, c.accel_noise, c.gyro_bias_walk, c.accel_bias_walk, c.calib_rot_walk,
                   c.calib_trans_walk, r.sigma_kappa, r.sigma_rho, r.sigma_vd}) {
    if (v < 0.0) throw ConfigError("noise parameters must be non-negative");
  }
  return c;
}

MatrixXd initial_covariance(const SystemState& xi, const InitSigmas& sigma) {
  const SystemState origin = identity_origin(0);
  const SymmetryElement X_hat = state_action_inverse(origin, xi);
  constexpr double h = 1e-6;
  MatrixXd J(kCoreDim, 24);
  Eigen::Matrix<double, 24, 1> x = Eigen::Matrix<double, 24, 1>::Zero();
  for (int j = 0; j < 24; ++j) {
    x(j) = h;
    const VectorXd plus = error_coordinates(X_hat, perturb_physical(xi, x), origin);
    x(j) = -h;
    const VectorXd minus = error_coordinates(X_hat, perturb_physical(xi, x), origin);
    x(j) = 0.0;
    J.col(j) = (plus - minus) / (2.0 * h);
  }
  Eigen::Matrix<double, 24, 1> var;
  var << Vector3d::Constant(sigma.attitude), Vector3d::Constant(sigma.velocity), Vector3d::Constant(sigma.position),
      Vector3d::Constant(sigma.gyro_bias), Vector3d::Constant(sigma.accel_bias),
      Vector3d::Constant(sigma.virtual_bias), Vector3d::Constant(sigma.calib_rot),
      Vector3d::Constant(sigma.calib_trans);
  var = var.cwiseProduct(var);
  MatrixXd P = J * var.asDiagonal() * J.transpose();
  return 0.5 * (P + P.transpose());
}

SystemState initial_state(const SimOutput& data, const RunConfig& config) {
  if (data.truth.empty()) throw std::runtime_error("initialization requires ground truth (groundtruth.csv)");
  SystemState xi;
  xi.T = data.truth.front().T;
  if (config.init_bias_from_groundtruth) {
    xi.b.head<3>() = data.truth.front().gyro_bias;
    xi.b.segment<3>(3) = data.truth.front().accel_bias;
  }
  const SE3 L = config.init_extrinsic.value_or(data.extrinsic);
  const CalibPerturbation& p = config.perturbation;
  xi.L = SE3(L.rotation() * SO3::exp(p.axis * p.angle), L.translation());
  return xi;
}

RunResult run_filter(const SimOutput& data, const RunConfig& config) {
  if (data.imu.empty()) throw std::runtime_error("dataset has no IMU records");
  FilterConfig fc = config.filter;
  fc.process_noise = ProcessNoise::from_densities(config.gyro_noise, config.accel_noise, config.gyro_bias_walk,
                                                  config.accel_bias_walk, config.calib_rot_walk,
                                                  config.calib_trans_walk);
  const double imu_rate = data.imu_rate > 0.0 ? data.imu_rate : 200.0;
  fc.radar_noise.sigma_omega = config.sigma_omega.value_or(config.gyro_noise * std::sqrt(imu_rate));

  const SystemState xi0 = initial_state(data, config);
  RunResult result;
  FilterBelief belief = initialize(xi0, initial_covariance(xi0, config.sigma), data.imu.front().t);
  belief.last_input = SystemInput::from_imu(data.imu.front().gyro, data.imu.front().acc);
  Vector3d last_gyro = data.imu.front().gyro;
  RunStats& stats = result.stats;

  auto advance_to = [&](double t) {
    const double dt = t - belief.last_time;
    if (dt <= 1e-12) return;
    propagate(belief, belief.last_input, dt, fc);
    belief.last_time = t;
    ++stats.propagations;
  };

  auto process_scan = [&](const RadarScan& scan) {
    if (config.use_doppler && !scan.detections.empty()) {
      const UpdateReport rep = update_doppler(belief, scan.detections, last_gyro, fc);
      ++stats.doppler_updates;
      stats.gated_rows += rep.rows_gated;
      stats.singular_updates += rep.singular ? 1 : 0;
    }
    if (config.use_msc) {
      // Each clone is matched once, when it is the oldest in a full window.
      if (belief.clone_count() >= fc.k_max) {
        std::vector<MatchObservation> matches;
        const auto& active = belief.registry.front().active_features;
        std::set<int> seen;
        for (const RadarDetection& det : scan.detections) {
          if (det.feature_id < 0 || !seen.insert(det.feature_id).second) continue;
          const auto it = active.find(det.feature_id);
          if (it != active.end()) matches.push_back({det.feature_id, 0, det.p_f, it->second});
        }
        if (!matches.empty()) {
          const UpdateReport rep = update_msc(belief, matches, fc);
          ++stats.msc_updates;
          stats.msc_rows += rep.rows_used;
          stats.gated_rows += rep.rows_gated;
          stats.singular_updates += rep.singular ? 1 : 0;
        }
        clone_marginalize(belief, 0);
      }
      std::map<int, Vector3d> features;
      for (const RadarDetection& det : scan.detections) {
        if (det.feature_id >= 0) features.emplace(det.feature_id, det.p_f);
      }
      // Features that dropped out of view can no longer be matched.
      for (int c = belief.clone_count() - 1; c >= 0; --c) {
        auto& active = belief.registry[c].active_features;
        for (auto it = active.begin(); it != active.end();) {
          it = features.count(it->first) ? std::next(it) : active.erase(it);
        }
        if (active.empty()) clone_marginalize(belief, c);
      }
      if (!features.empty()) {
        clone_augment(belief, scan.t, std::move(features), fc.k_max);
        ++stats.clones_created;
      }
    }
    result.estimates.push_back(make_record(belief, scan.t));
  };

  result.estimates.push_back(make_record(belief, belief.last_time));
  std::size_t next_scan = 0;
  while (next_scan < data.radar.size() && data.radar[next_scan].t < data.imu.front().t) ++next_scan;
  for (std::size_t i = 0; i < data.imu.size(); ++i) {
    const ImuRecord& imu = data.imu[i];
    while (next_scan < data.radar.size() && data.radar[next_scan].t < imu.t) {
      advance_to(data.radar[next_scan].t);
      process_scan(data.radar[next_scan]);
      ++next_scan;
    }
    advance_to(imu.t);
    belief.last_input = SystemInput::from_imu(imu.gyro, imu.acc);
    last_gyro = imu.gyro;
    while (next_scan < data.radar.size() && data.radar[next_scan].t == imu.t) {
      process_scan(data.radar[next_scan]);
      ++next_scan;
    }
  }
  if (result.estimates.empty() || result.estimates.back().t != belief.last_time) {
    result.estimates.push_back(make_record(belief, belief.last_time));
  }
  result.final_belief = std::move(belief);
  return result;
}

void split_estimates(const std::vector<EstimateRecord>& records, std::vector<PoseSample>& poses,
                     std::vector<Matrix6d>& covariances) {
  poses.clear();
  covariances.clear();
  for (const EstimateRecord& r : records) {
    poses.push_back({r.t, r.T.rotation(), r.T.position()});
    covariances.push_back(r.pose_covariance);
  }
}

std::vector<PoseSample> truth_poses(const std::vector<GroundTruthRecord>& truth) {
  std::vector<PoseSample> poses;
  poses.reserve(truth.size());
  for (const GroundTruthRecord& r : truth) poses.push_back({r.t, r.T.rotation(), r.T.position()});
  return poses;
}

MetricsReport evaluate_run(const std::vector<EstimateRecord>& estimates, const std::vector<GroundTruthRecord>& truth,
                           const std::optional<SO3>& S_true, AlignedPair* pair_out) {
  std::vector<PoseSample> est;
  std::vector<Matrix6d> cov;
  split_estimates(estimates, est, cov);
  const std::vector<PoseSample> gt = truth_poses(truth);
  AlignedPair pair = associate(gt, est, cov);
  // Covariances that are not positive definite (e.g. noise-free runs) disable ANEES.
  bool usable = true;
  for (const Matrix6d& c : pair.covariance) {
    const Eigen::LDLT<Matrix6d> ldlt(c);
    usable = usable && ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-15;
  }
  if (!usable) pair.covariance.clear();

  MetricsReport report = evaluate_metrics(pair);
  // Path length over the whole ground truth inside the estimated time span.
  std::vector<PoseSample> span;
  for (const PoseSample& p : gt) {
    if (p.t >= pair.t.front() - 1e-9 && p.t <= pair.t.back() + 1e-9) span.push_back(p);
  }
  report.trajectory_length = path_length(span);
  if (report.trajectory_length > 0.0) {
    const auto [pos, yaw] = drift(pair, report.trajectory_length);
    report.position_drift_cm_per_m = pos;
    report.yaw_drift_deg_per_m = yaw;
  }
  if (S_true) {
    for (const EstimateRecord& r : estimates) {
      report.calib_time.push_back(r.t);
      report.calib_error.push_back(calibration_error(*S_true, r.L.rotation()));
    }
    report.convergence = classify_convergence(report.calib_error);
  }
  if (pair_out) *pair_out = std::move(pair);
  return report;
}

std::string report_to_json(const MetricsReport& report, const RunStats* stats) {
  nlohmann::ordered_json j;
  j["translation_rmse_m"] = report.translation_rmse;
  j["rotation_rmse_deg"] = report.rotation_rmse_deg;
  j["position_drift_cm_per_m"] = report.position_drift_cm_per_m;
  j["yaw_drift_deg_per_m"] = report.yaw_drift_deg_per_m;
  j["trajectory_length_m"] = report.trajectory_length;
  j["anees"] = report.anees ? nlohmann::ordered_json(*report.anees) : nlohmann::ordered_json(nullptr);
  if (!report.calib_error.empty()) {
    j["calibration"]["initial_error_deg"] = report.calib_error.front() / kDegToRad;
    j["calibration"]["final_error_deg"] = report.calib_error.back() / kDegToRad;
    j["calibration"]["convergence"] = to_string(*report.convergence);
  }
  if (stats) {
    j["stats"]["propagations"] = stats->propagations;
    j["stats"]["doppler_updates"] = stats->doppler_updates;
    j["stats"]["msc_updates"] = stats->msc_updates;
    j["stats"]["msc_rows"] = stats->msc_rows;
    j["stats"]["gated_rows"] = stats->gated_rows;
    j["stats"]["singular_updates"] = stats->singular_updates;
    j["stats"]["clones_created"] = stats->clones_created;
  }
  return j.dump(2);
}

std::vector<MonteCarloOutcome> run_montecarlo(const SimSpec& spec, const RunConfig& config,
                                              const std::vector<MonteCarloJob>& jobs, int threads) {
  std::vector<MonteCarloOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      MonteCarloOutcome& out = outcomes[i];
      out.job = jobs[i];
      try {
        SimConfig sim = spec.sim;
        sim.seed = jobs[i].seed;
        const SimOutput data = run_simulation(spec.trajectory, sim);
        RunConfig rc = config;
        rc.perturbation = jobs[i].perturbation;
        const RunResult run = run_filter(data, rc);
        out.report = evaluate_run(run.estimates, data.truth, data.extrinsic.rotation());
        out.stats = run.stats;
        out.final_calib_error = out.report.calib_error.empty() ? 0.0 : out.report.calib_error.back();
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return outcomes;
}

int thread_budget() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("EQF_RIO_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::logic_error&) {
      // ignore malformed values
    }
  }
  return n;
}

}  // namespace eqf_rio
