#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqf_rio/app/config.hpp"
#include "eqf_rio/app/io.hpp"
#include "eqf_rio/core/filter.hpp"
#include "eqf_rio/eval/metrics.hpp"

namespace eqf_rio {

/// Trajectory and sensor setup read by `simulate`.
struct SimSpec {
  TrajectorySpec trajectory;
  SimConfig sim;
};
SimSpec load_sim_spec(const KeyValueFile& file);

/// Standard deviations of the initial error in physical coordinates:
/// world-frame attitude, velocity, position, biases, radar-frame extrinsic
/// rotation and extrinsic translation.
struct InitSigmas {
  double attitude = 1e-3;
  double velocity = 1e-2;
  double position = 1e-3;
  double gyro_bias = 5e-3;
  double accel_bias = 5e-2;
  double virtual_bias = 1e-6;
  double calib_rot = 0.05;
  double calib_trans = 0.05;
};

/// Rotation applied to the initial extrinsic estimate: S_hat = S Exp(angle axis).
struct CalibPerturbation {
  Vector3d axis = Vector3d::UnitY();
  double angle = 0.0;  // rad
  std::string label = "none";
};
/// Parses "none" or "<x|y|z>:<angle>deg" (also "rad").
CalibPerturbation parse_perturbation(const std::string& text);

struct RunConfig {
  RunConfig() {
    filter.radar_noise.sigma_kappa = 0.05;
    filter.radar_noise.sigma_rho = 0.5 * M_PI / 180.0;
    filter.radar_noise.sigma_vd = 0.05;
  }

  FilterConfig filter;
  InitSigmas sigma;
  double gyro_noise = 0.005;
  double accel_noise = 0.05;
  double gyro_bias_walk = 1e-4;
  double accel_bias_walk = 1e-3;
  double calib_rot_walk = 0.0;
  double calib_trans_walk = 0.0;
  std::optional<double> sigma_omega;
  bool use_doppler = true;
  bool use_msc = true;
  bool init_bias_from_groundtruth = false;
  std::optional<SE3> init_extrinsic;
  CalibPerturbation perturbation;
  std::uint64_t seed = 1;
};
RunConfig load_run_config(const KeyValueFile& file);

struct RunStats {
  int propagations = 0;
  int doppler_updates = 0;
  int msc_updates = 0;
  int msc_rows = 0;
  int gated_rows = 0;
  int singular_updates = 0;
  int clones_created = 0;
};

struct RunResult {
  std::vector<EstimateRecord> estimates;
  RunStats stats;
  FilterBelief final_belief;
};

/// Sigma_init = J diag(sigma^2) J^T with J the Jacobian of the error chart
/// with respect to the physical perturbations, evaluated at xi.
MatrixXd initial_covariance(const SystemState& xi, const InitSigmas& sigma);

/// Initial state from the first ground-truth record, the dataset extrinsic
/// (or the configured one) and the configured perturbation.
SystemState initial_state(const SimOutput& data, const RunConfig& config);

/// Time-ordered event loop: IMU samples drive propagation, radar scans trigger
/// the Doppler update, MSC update and clone maintenance.
RunResult run_filter(const SimOutput& data, const RunConfig& config);

/// Estimate rows reduced to poses and APE covariances.
void split_estimates(const std::vector<EstimateRecord>& records, std::vector<PoseSample>& poses,
                     std::vector<Matrix6d>& covariances);
std::vector<PoseSample> truth_poses(const std::vector<GroundTruthRecord>& truth);

/// Full metrics of an estimate against ground truth, including the
/// calibration error series when the true extrinsic rotation is known.
MetricsReport evaluate_run(const std::vector<EstimateRecord>& estimates, const std::vector<GroundTruthRecord>& truth,
                           const std::optional<SO3>& S_true, AlignedPair* pair_out = nullptr);

std::string report_to_json(const MetricsReport& report, const RunStats* stats = nullptr);

struct MonteCarloJob {
  std::uint64_t seed = 1;
  CalibPerturbation perturbation;
};

struct MonteCarloOutcome {
  MonteCarloJob job;
  bool ok = false;
  std::string error;
  MetricsReport report;
  RunStats stats;
  double final_calib_error = 0.0;
};

/// Runs simulate -> run -> evaluate for each job on up to `threads` threads.
std::vector<MonteCarloOutcome> run_montecarlo(const SimSpec& spec, const RunConfig& config,
                                              const std::vector<MonteCarloJob>& jobs, int threads);

/// Thread cap from EQF_RIO_THREADS, defaulting to the hardware concurrency.
int thread_budget();

}  // namespace eqf_rio
