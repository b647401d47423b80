#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "eqf_rio/app/pipeline.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace eqf_rio;
using eqf_rio::testing::Rng;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("eqf_rio_app_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

template <class Fn>
std::string error_message(Fn fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

SimSpec small_spec(const std::string& preset, double duration) {
  SimSpec spec;
  spec.trajectory = TrajectorySpec::from_preset(preset, duration);
  spec.sim.seed = 3;
  return spec;
}

RunConfig noise_free_config() {
  RunConfig config;
  config.gyro_noise = config.accel_noise = 0.0;
  config.gyro_bias_walk = config.accel_bias_walk = 0.0;
  config.filter.radar_noise = {};
  config.sigma_omega = 0.0;
  config.init_bias_from_groundtruth = true;
  return config;
}

}  // namespace

TEST(KeyValueFile, ParsesValuesAndComments) {
  const KeyValueFile f = KeyValueFile::parse(
      "# header\n"
      "a.b = 1.5   # trailing\n"
      "\n"
      "flag = on\n"
      "vec = 1, 2 3\n"
      "n = 42\n"
      "name = excited\n");
  EXPECT_DOUBLE_EQ(f.get_double("a.b", 0.0), 1.5);
  EXPECT_TRUE(f.get_bool("flag", false));
  EXPECT_EQ(f.get_vec3("vec", Vector3d::Zero()), Vector3d(1, 2, 3));
  EXPECT_EQ(f.get_int("n", 0), 42);
  EXPECT_EQ(f.get_string("name", ""), "excited");
  EXPECT_EQ(f.get_double("missing", 7.0), 7.0);
  EXPECT_FALSE(f.has("missing"));
}

TEST(KeyValueFile, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_message([] { KeyValueFile::parse("a = 1\nbroken line\n", "cfg"); }).find("cfg:2:"),
            std::string::npos);
  EXPECT_NE(error_message([] { KeyValueFile::parse("a = 1\n\na = 2\n", "cfg"); }).find("cfg:3:"),
            std::string::npos);
  const KeyValueFile f = KeyValueFile::parse("x = 1\ny = abc\nz = 1 2\nb = maybe\nn = 1.5\n", "cfg");
  EXPECT_NE(error_message([&] { f.get_double("y", 0.0); }).find("cfg:2:"), std::string::npos);
  EXPECT_NE(error_message([&] { f.get_vec3("z", Vector3d::Zero()); }).find("cfg:3:"), std::string::npos);
  EXPECT_THROW(f.get_bool("b", false), ConfigError);
  EXPECT_THROW(f.get_int("n", 0), ConfigError);
  EXPECT_NE(error_message([&] { f.reject_unknown({"x", "y", "z", "b"}); }).find("cfg:5: unknown key 'n'"),
            std::string::npos);
  EXPECT_THROW(KeyValueFile::load("/nonexistent/run.cfg"), ConfigError);
}

TEST(SimSpecFile, LoadsAndRejectsUnknownKeys) {
  const SimSpec spec = load_sim_spec(KeyValueFile::parse(
      "trajectory.preset = hover\ntrajectory.duration = 12\nsim.imu_rate = 400\nsim.seed = 9\n"
      "sim.extrinsic_rpy_deg = 0, 0, 90\nsim.extrinsic_translation = 0.1, 0, 0\n"));
  EXPECT_EQ(spec.trajectory.preset, "hover");
  EXPECT_DOUBLE_EQ(spec.trajectory.duration, 12.0);
  EXPECT_DOUBLE_EQ(spec.sim.imu_rate, 400.0);
  EXPECT_EQ(spec.sim.seed, 9u);
  EXPECT_LT((spec.sim.extrinsic.rotation().matrix() - SO3::rot_z(M_PI / 2).matrix()).norm(), 1e-12);
  EXPECT_THROW(load_sim_spec(KeyValueFile::parse("sim.imu_rat = 1\n")), ConfigError);
  EXPECT_THROW(load_sim_spec(KeyValueFile::parse("trajectory.preset = spiral\n")), ConfigError);
  EXPECT_THROW(load_sim_spec(KeyValueFile::parse("sim.imu_rate = 5\nsim.radar_rate = 10\n")), ConfigError);
}

TEST(RunConfigFile, LoadsAndValidates) {
  const RunConfig c = load_run_config(KeyValueFile::parse(
      "noise.gyro = 0.01\nradar.sigma_vd = 0.2\nfilter.k_max = 4\nfilter.msc = false\nperturb = y:80deg\n"
      "init.sigma.calib_rot = 1.5\nseed = 17\n"));
  EXPECT_DOUBLE_EQ(c.gyro_noise, 0.01);
  EXPECT_DOUBLE_EQ(c.filter.radar_noise.sigma_vd, 0.2);
  EXPECT_EQ(c.filter.k_max, 4);
  EXPECT_FALSE(c.use_msc);
  EXPECT_TRUE(c.use_doppler);
  EXPECT_DOUBLE_EQ(c.sigma.calib_rot, 1.5);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_NEAR(c.perturbation.angle, 80.0 * M_PI / 180.0, 1e-15);
  EXPECT_THROW(load_run_config(KeyValueFile::parse("noise.gyro = -1\n")), ConfigError);
  EXPECT_THROW(load_run_config(KeyValueFile::parse("filter.kmax = 3\n")), ConfigError);

  const RunConfig defaults;
  EXPECT_EQ(defaults.filter.k_max, 10);
  EXPECT_GT(defaults.filter.radar_noise.sigma_vd, 0.0);
}

TEST(Perturbation, Parsing) {
  const CalibPerturbation y = parse_perturbation("y:80deg");
  EXPECT_EQ(y.axis, Vector3d::UnitY());
  EXPECT_NEAR(y.angle, 1.3962634015954636, 1e-15);
  EXPECT_EQ(y.label, "y:80deg");
  const CalibPerturbation x = parse_perturbation("x:0.5rad");
  EXPECT_EQ(x.axis, Vector3d::UnitX());
  EXPECT_DOUBLE_EQ(x.angle, 0.5);
  EXPECT_NEAR(parse_perturbation("z:10").angle, 10.0 * M_PI / 180.0, 1e-15);
  EXPECT_EQ(parse_perturbation("none").angle, 0.0);
  for (const char* bad : {"w:10deg", "y80deg", "y:abcdeg", "y:10degs", "yy:10"}) {
    EXPECT_THROW(parse_perturbation(bad), ConfigError) << bad;
  }
}

TEST(InitialState, AppliesPerturbation) {
  const SimOutput data = run_simulation(small_spec("hover", 1.0).trajectory, small_spec("hover", 1.0).sim);
  RunConfig config;
  config.perturbation = parse_perturbation("y:80deg");
  const SystemState xi = initial_state(data, config);
  EXPECT_NEAR(calibration_error(data.extrinsic.rotation(), xi.L.rotation()), 1.3963, 1e-4);
  const SO3 offset = data.extrinsic.rotation().inverse() * xi.L.rotation();
  EXPECT_LT((offset.log() - Vector3d(0, 80.0 * M_PI / 180.0, 0)).norm(), 1e-12);
  EXPECT_EQ(xi.L.translation(), data.extrinsic.translation());
  EXPECT_EQ(xi.T.matrix(), data.truth.front().T.matrix());
}

TEST(InitialCovariance, MatchesSampledPhysicalPerturbations) {
  Rng rng(41);
  const SystemState xi = rng.state(0);
  InitSigmas sigma;
  sigma.attitude = 0.01;
  sigma.velocity = 0.02;
  sigma.position = 0.03;
  sigma.gyro_bias = 0.004;
  sigma.accel_bias = 0.02;
  sigma.virtual_bias = 0.01;
  sigma.calib_rot = 0.01;
  sigma.calib_trans = 0.02;
  const MatrixXd P = initial_covariance(xi, sigma);
  ASSERT_EQ(P.rows(), 24);
  EXPECT_EQ(P, P.transpose());

  const SystemState origin = SystemState::identity(0);
  const SymmetryElement X_hat = state_action_inverse(origin, xi);
  const int samples = 20000;
  MatrixXd sample = MatrixXd::Zero(24, 24);
  for (int s = 0; s < samples; ++s) {
    SystemState y = xi;
    const Vector3d dtheta = rng.normal(sigma.attitude) * Vector3d::UnitX() +
                            rng.normal(sigma.attitude) * Vector3d::UnitY() +
                            rng.normal(sigma.attitude) * Vector3d::UnitZ();
    Vector3d dv, dp, dbw, dba, dbn, dS, dt;
    for (int i = 0; i < 3; ++i) {
      dv(i) = rng.normal(sigma.velocity);
      dp(i) = rng.normal(sigma.position);
      dbw(i) = rng.normal(sigma.gyro_bias);
      dba(i) = rng.normal(sigma.accel_bias);
      dbn(i) = rng.normal(sigma.virtual_bias);
      dS(i) = rng.normal(sigma.calib_rot);
      dt(i) = rng.normal(sigma.calib_trans);
    }
    y.T = SE23(SO3::exp(dtheta) * xi.T.rotation(), xi.T.velocity() + dv, xi.T.position() + dp);
    y.b << xi.b.head<3>() + dbw, xi.b.segment<3>(3) + dba, xi.b.tail<3>() + dbn;
    y.L = SE3(xi.L.rotation() * SO3::exp(dS), xi.L.translation() + dt);
    const VectorXd e = error_coordinates(X_hat, y, origin);
    sample += e * e.transpose() / samples;
  }
  const VectorXd scale = P.diagonal().cwiseSqrt();
  const MatrixXd diff = (sample - P).cwiseQuotient(scale * scale.transpose());
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 0.06);
}

TEST(DatasetIo, RoundTripIsLossless) {
  SimSpec spec = small_spec("excited", 2.0);
  spec.sim.gyro_noise = 0.005;
  spec.sim.sigma_kappa = 0.05;
  spec.sim.gyro_bias_sigma = 0.01;
  const SimOutput data = run_simulation(spec.trajectory, spec.sim);
  const fs::path dir = scratch_dir("roundtrip");
  write_dataset(data, dir.string());
  const SimOutput back = read_dataset(dir.string());

  ASSERT_EQ(back.imu.size(), data.imu.size());
  for (std::size_t i = 0; i < data.imu.size(); ++i) {
    EXPECT_EQ(back.imu[i].t, data.imu[i].t);
    EXPECT_EQ(back.imu[i].gyro, data.imu[i].gyro);
    EXPECT_EQ(back.imu[i].acc, data.imu[i].acc);
  }
  ASSERT_EQ(back.radar.size(), data.radar.size());
  for (std::size_t s = 0; s < data.radar.size(); ++s) {
    EXPECT_EQ(back.radar[s].t, data.radar[s].t);
    ASSERT_EQ(back.radar[s].detections.size(), data.radar[s].detections.size());
    for (std::size_t j = 0; j < data.radar[s].detections.size(); ++j) {
      EXPECT_EQ(back.radar[s].detections[j].feature_id, data.radar[s].detections[j].feature_id);
      EXPECT_EQ(back.radar[s].detections[j].p_f, data.radar[s].detections[j].p_f);
      EXPECT_EQ(back.radar[s].detections[j].doppler, data.radar[s].detections[j].doppler);
    }
  }
  ASSERT_EQ(back.truth.size(), data.truth.size());
  for (std::size_t i = 0; i < data.truth.size(); ++i) {
    EXPECT_EQ(back.truth[i].t, data.truth[i].t);
    EXPECT_LT((back.truth[i].T.matrix() - data.truth[i].T.matrix()).norm(), 1e-14);
    EXPECT_EQ(back.truth[i].T.position(), data.truth[i].T.position());
    EXPECT_EQ(back.truth[i].gyro_bias, data.truth[i].gyro_bias);
  }
  EXPECT_EQ(back.landmarks, data.landmarks);
  EXPECT_EQ(back.imu_rate, data.imu_rate);
  EXPECT_LT((back.extrinsic.matrix() - data.extrinsic.matrix()).norm(), 1e-14);
  fs::remove_all(dir);
}

TEST(DatasetIo, RejectsMalformedFiles) {
  const fs::path dir = scratch_dir("malformed");
  write_text(dir / "imu.csv", "t,wx,wy,wz,ax,ay,az\n0,0,0,0,0,0,9.81\n0.01,0,0,0,0,0,9.81\n0.005,0,0,0,0,0,9.81\n");
  const std::string msg = error_message([&] { read_dataset(dir.string()); });
  EXPECT_NE(msg.find("imu.csv:4:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("non-monotone"), std::string::npos);

  write_text(dir / "imu.csv", "t,wx,wy,wz,ax,ay,az\n0,0,0,0,0,9.81\n");
  EXPECT_THROW(read_dataset(dir.string()), DataError);
  write_text(dir / "imu.csv", "t,wx,wy,wz,ax,ay,az\n0,0,0,x,0,0,9.81\n");
  EXPECT_THROW(read_dataset(dir.string()), DataError);
  EXPECT_THROW(read_dataset((dir / "missing").string()), DataError);
  fs::remove_all(dir);
}

TEST(EstimateIo, RoundTripIsLossless) {
  Rng rng(42);
  std::vector<EstimateRecord> records;
  for (int i = 0; i < 20; ++i) {
    EstimateRecord r;
    r.t = 0.1 * i + 1e-7;
    r.T = rng.se23();
    r.b = rng.vec(9, 0.1);
    r.L = rng.se3();
    const MatrixXd A = rng.vec(36, 1.0).reshaped(6, 6);
    r.pose_covariance = A * A.transpose();
    records.push_back(r);
  }
  const fs::path dir = scratch_dir("estimates");
  write_estimates(records, (dir / "est.csv").string());
  const auto back = read_estimates((dir / "est.csv").string());
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].t, records[i].t);
    EXPECT_EQ(back[i].b, records[i].b);
    EXPECT_EQ(back[i].T.position(), records[i].T.position());
    EXPECT_LT((back[i].T.matrix() - records[i].T.matrix()).norm(), 1e-14);
    EXPECT_LT((back[i].L.matrix() - records[i].L.matrix()).norm(), 1e-14);
    EXPECT_EQ(back[i].pose_covariance, records[i].pose_covariance);
  }
  fs::remove_all(dir);
}

TEST(Quaternion, RoundTrip) {
  Rng rng(43);
  for (int i = 0; i < 100; ++i) {
    const SO3 R = rng.so3();
    const Eigen::Vector4d q = rotation_to_quaternion(R);
    EXPECT_GE(q(0), 0.0);
    EXPECT_NEAR(q.norm(), 1.0, 1e-15);
    EXPECT_LT((quaternion_to_rotation(q).matrix() - R.matrix()).norm(), 1e-14);
  }
  EXPECT_THROW(quaternion_to_rotation(Eigen::Vector4d::Zero()), DataError);
}

TEST(Pipeline, NoiseFreeHoverStaysAtTruth) {
  const SimSpec spec = small_spec("hover", 10.0);
  const SimOutput data = run_simulation(spec.trajectory, spec.sim);
  const RunResult result = run_filter(data, noise_free_config());
  ASSERT_FALSE(result.estimates.empty());
  EXPECT_EQ(result.estimates.front().t, 0.0);
  EXPECT_NEAR(result.estimates.back().t, 10.0, 1e-9);
  const Vector3d p_err = result.estimates.back().T.position() - data.truth.back().T.position();
  EXPECT_LT(p_err.norm(), 1e-6);
  EXPECT_EQ(result.stats.doppler_updates, 100);
  EXPECT_GT(result.stats.propagations, 1900);
}

TEST(Pipeline, DeterministicGivenInputs) {
  SimSpec spec = small_spec("excited", 3.0);
  spec.sim.gyro_noise = 0.005;
  spec.sim.accel_noise = 0.05;
  spec.sim.sigma_kappa = 0.05;
  spec.sim.sigma_vd = 0.05;
  const SimOutput data = run_simulation(spec.trajectory, spec.sim);
  RunConfig config;
  config.perturbation = parse_perturbation("y:10deg");
  const RunResult a = run_filter(data, config);
  const RunResult b = run_filter(data, config);
  ASSERT_EQ(a.estimates.size(), b.estimates.size());
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    EXPECT_EQ(a.estimates[i].T.matrix(), b.estimates[i].T.matrix());
    EXPECT_EQ(a.estimates[i].L.matrix(), b.estimates[i].L.matrix());
    EXPECT_EQ(a.estimates[i].pose_covariance, b.estimates[i].pose_covariance);
  }
  EXPECT_EQ(a.final_belief.Sigma, b.final_belief.Sigma);
  EXPECT_GT(a.stats.msc_updates, 0);
  EXPECT_GT(a.stats.clones_created, 0);
  EXPECT_LE(a.final_belief.clone_count(), config.filter.k_max);
}

TEST(Pipeline, EstimateEqualToTruthGivesZeroMetrics) {
  const SimOutput data = run_simulation(small_spec("excited", 2.0).trajectory, small_spec("excited", 2.0).sim);
  std::vector<EstimateRecord> est;
  for (const GroundTruthRecord& g : data.truth) {
    EstimateRecord r;
    r.t = g.t;
    r.T = g.T;
    r.L = data.extrinsic;
    est.push_back(r);
  }
  const MetricsReport report = evaluate_run(est, data.truth, data.extrinsic.rotation());
  EXPECT_EQ(report.translation_rmse, 0.0);
  EXPECT_LT(report.rotation_rmse_deg, 1e-6);
  EXPECT_EQ(report.position_drift_cm_per_m, 0.0);
  EXPECT_GT(report.trajectory_length, 0.0);
  EXPECT_FALSE(report.anees.has_value());
  ASSERT_TRUE(report.convergence.has_value());
  EXPECT_EQ(*report.convergence, Convergence::Converged);

  const auto json = nlohmann::json::parse(report_to_json(report));
  for (const char* key : {"translation_rmse_m", "rotation_rmse_deg", "position_drift_cm_per_m",
                          "yaw_drift_deg_per_m", "trajectory_length_m", "anees"}) {
    EXPECT_TRUE(json.contains(key)) << key;
  }
}

TEST(Pipeline, EvaluateRespectsAssociationWindow) {
  const SimOutput data = run_simulation(small_spec("hover", 1.0).trajectory, small_spec("hover", 1.0).sim);
  std::vector<GroundTruthRecord> sparse;
  for (std::size_t i = 0; i < data.truth.size(); i += 40) sparse.push_back(data.truth[i]);
  EstimateRecord r;
  r.T = data.truth.front().T;
  r.t = 0.2 + 0.006;
  EXPECT_THROW(evaluate_run({r}, sparse, std::nullopt), std::invalid_argument);
  r.t = 0.2 + 0.004;
  EXPECT_NO_THROW(evaluate_run({r}, sparse, std::nullopt));
}

TEST(MonteCarlo, SingleJobMatchesRunAndEvaluate) {
  SimSpec spec = small_spec("excited", 3.0);
  spec.sim.gyro_noise = 0.005;
  spec.sim.sigma_vd = 0.05;
  RunConfig config;
  const auto outcomes = run_montecarlo(spec, config, {{spec.sim.seed, parse_perturbation("none")}}, 1);
  ASSERT_EQ(outcomes.size(), 1u);
  ASSERT_TRUE(outcomes[0].ok) << outcomes[0].error;

  const SimOutput data = run_simulation(spec.trajectory, spec.sim);
  const RunResult run = run_filter(data, config);
  const MetricsReport report = evaluate_run(run.estimates, data.truth, data.extrinsic.rotation());
  EXPECT_EQ(outcomes[0].report.translation_rmse, report.translation_rmse);
  EXPECT_EQ(outcomes[0].report.rotation_rmse_deg, report.rotation_rmse_deg);
  EXPECT_EQ(outcomes[0].final_calib_error, report.calib_error.back());
}

TEST(MonteCarlo, ParallelMatchesSerialAndRecordsFailures) {
  SimSpec spec = small_spec("excited", 2.0);
  spec.sim.gyro_noise = 0.005;
  RunConfig config;
  std::vector<MonteCarloJob> jobs;
  for (int s = 0; s < 4; ++s) jobs.push_back({static_cast<std::uint64_t>(10 + s), parse_perturbation("y:30deg")});
  const auto serial = run_montecarlo(spec, config, jobs, 1);
  const auto parallel = run_montecarlo(spec, config, jobs, 3);
  ASSERT_EQ(serial.size(), 4u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].job.seed, jobs[i].seed);
    EXPECT_EQ(serial[i].report.translation_rmse, parallel[i].report.translation_rmse);
  }

  RunConfig broken = config;
  broken.filter.dt_max = 1e-6;
  const auto failed = run_montecarlo(spec, broken, {jobs[0]}, 1);
  ASSERT_EQ(failed.size(), 1u);
  EXPECT_FALSE(failed[0].ok);
  EXPECT_FALSE(failed[0].error.empty());
}
