#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqf_rio/core/measurement.hpp"

namespace eqf_rio {

/// Smooth analytic trajectory: per-axis position sinusoids plus a constant
/// velocity, and roll/pitch/yaw sinusoids composed as Rz(yaw) Ry(pitch) Rx(roll).
struct TrajectorySpec {
  std::string preset = "hover";
  double duration = 10.0;
  Vector3d center = Vector3d(0.0, 0.0, 1.5);
  Vector3d amplitude = Vector3d::Zero();
  Vector3d frequency = Vector3d::Zero();
  Vector3d phase = Vector3d::Zero();
  Vector3d linear_velocity = Vector3d::Zero();
  /// Euler angles ordered (roll, pitch, yaw).
  Vector3d euler_offset = Vector3d::Zero();
  Vector3d euler_amplitude = Vector3d::Zero();
  Vector3d euler_frequency = Vector3d::Zero();
  Vector3d euler_phase = Vector3d::Zero();

  /// "hover", "excited" or "line". Throws std::invalid_argument otherwise.
  static TrajectorySpec from_preset(const std::string& name, double duration);
  void validate() const;
};

struct TrajectorySample {
  SO3 R;
  Vector3d p = Vector3d::Zero();
  Vector3d v = Vector3d::Zero();
  Vector3d a_world = Vector3d::Zero();
  Vector3d omega_body = Vector3d::Zero();
};

class Trajectory {
 public:
  explicit Trajectory(TrajectorySpec spec);
  TrajectorySample sample(double t) const;
  const TrajectorySpec& spec() const { return spec_; }

 private:
  TrajectorySpec spec_;
};

struct SimConfig {
  double imu_rate = 200.0;
  double radar_rate = 10.0;
  double gyro_noise = 0.0;        // rad/s/sqrt(Hz)
  double accel_noise = 0.0;       // m/s^2/sqrt(Hz)
  double gyro_bias_walk = 0.0;    // rad/s^2/sqrt(Hz)
  double accel_bias_walk = 0.0;   // m/s^3/sqrt(Hz)
  double gyro_bias_sigma = 0.0;   // spread of the initial gyro bias (rad/s)
  double accel_bias_sigma = 0.0;  // spread of the initial accel bias (m/s^2)
  double sigma_kappa = 0.0;
  double sigma_rho = 0.0;
  double sigma_vd = 0.0;
  SE3 extrinsic = SE3(SO3::rot_z(0.2) * SO3::rot_y(-0.1), Vector3d(0.1, -0.05, 0.08));
  int landmark_count = 150;
  Vector3d landmark_half_extent = Vector3d(20.0, 20.0, 6.0);
  double fov_half_angle = 60.0 * M_PI / 180.0;
  double max_range = 20.0;
  double min_range = 0.5;
  /// Probability that a detection's feature id is replaced by a wrong one.
  double mismatch_rate = 0.0;
  Vector3d gravity = kGravity;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ImuRecord {
  double t = 0.0;
  Vector3d gyro = Vector3d::Zero();
  Vector3d acc = Vector3d::Zero();
};

struct GroundTruthRecord {
  double t = 0.0;
  SE23 T;
  Vector3d gyro_bias = Vector3d::Zero();
  Vector3d accel_bias = Vector3d::Zero();
};

struct RadarScan {
  double t = 0.0;
  int scan_id = 0;
  std::vector<RadarDetection> detections;
};

struct SimOutput {
  std::vector<GroundTruthRecord> truth;
  std::vector<ImuRecord> imu;
  std::vector<RadarScan> radar;
  std::vector<Vector3d> landmarks;
  SE3 extrinsic;
  double imu_rate = 0.0;
  double radar_rate = 0.0;
};

/// Noise-free biased IMU reading for the step starting at t, sampled at the
/// interval midpoint: (omega_body, R^T (a_world - g)) + biases.
ImuRecord synthesize_imu(const Trajectory& trajectory, double t, double dt, const Vector3d& gyro_bias,
                         const Vector3d& accel_bias, const Vector3d& gravity = kGravity);

/// Noise-free detections of the landmarks visible from state xi; gyro is the
/// biased angular velocity reading used in the Doppler model.
std::vector<RadarDetection> synthesize_radar_scan(const SystemState& xi, const Vector3d& gyro,
                                                  const std::vector<Vector3d>& landmarks, const SimConfig& config);

/// Ground truth is the exact piecewise-constant integration of the discrete
/// model driven by the noise-free IMU readings; IMU records add white noise.
SimOutput run_simulation(const TrajectorySpec& spec, const SimConfig& config);

}  // namespace eqf_rio
