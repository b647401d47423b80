#pragma once

#include <string>
#include <vector>

#include "eqf_rio/sim/simulator.hpp"

namespace eqf_rio {

/// Malformed data file. Maps to exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// One row of estimate.csv.
struct EstimateRecord {
  double t = 0.0;
  SE23 T;
  Vector9d b = Vector9d::Zero();
  SE3 L;
  /// Covariance of (APE_R, APE_T).
  Matrix6d pose_covariance = Matrix6d::Zero();
};

Eigen::Vector4d rotation_to_quaternion(const SO3& R);  // (w, x, y, z)
SO3 quaternion_to_rotation(const Eigen::Vector4d& q);

/// imu.csv, radar.csv, groundtruth.csv, groundtruth_bias.csv, landmarks.csv, meta.txt.
void write_dataset(const SimOutput& data, const std::string& dir);
/// Ground truth is loaded when present. Timestamps must be non-decreasing.
SimOutput read_dataset(const std::string& dir);

std::vector<GroundTruthRecord> read_groundtruth(const std::string& path);

void write_estimates(const std::vector<EstimateRecord>& records, const std::string& path);
std::vector<EstimateRecord> read_estimates(const std::string& path);

}  // namespace eqf_rio
