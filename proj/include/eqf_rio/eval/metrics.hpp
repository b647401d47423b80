#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqf_rio/lie/se23.hpp"

namespace eqf_rio {

struct PoseSample {
  double t = 0.0;
  SO3 R;
  Vector3d p = Vector3d::Zero();
};

/// Time-matched ground-truth and estimated poses.
struct AlignedPair {
  std::vector<double> t;
  std::vector<PoseSample> truth;
  std::vector<PoseSample> estimate;
  /// Covariance of (APE_R, APE_T) per pose; empty if unavailable.
  std::vector<Matrix6d> covariance;

  std::size_t size() const { return t.size(); }
};

struct ApeSample {
  Vector3d rotation = Vector3d::Zero();
  Vector3d translation = Vector3d::Zero();
};

enum class Convergence { Converged, Partial, Fail };
const char* to_string(Convergence c);

struct MetricsReport {
  double translation_rmse = 0.0;  // m
  double rotation_rmse_deg = 0.0;
  double position_drift_cm_per_m = 0.0;
  double yaw_drift_deg_per_m = 0.0;
  double trajectory_length = 0.0;  // m
  std::optional<double> anees;
  std::vector<double> calib_time;
  std::vector<double> calib_error;  // rad
  std::optional<Convergence> convergence;
};

/// Association of estimates to ground truth by nearest timestamp within tol.
/// Throws std::invalid_argument if nothing overlaps.
AlignedPair associate(const std::vector<PoseSample>& truth, const std::vector<PoseSample>& estimate,
                      const std::vector<Matrix6d>& covariance = {}, double tol = 5e-3);

/// APE_R = log(R^T R_hat), APE_T = R^T (p_hat - p).
std::vector<ApeSample> ape(const AlignedPair& pair);
double rmse(const std::vector<Vector3d>& errors);
/// Mean of e^T Sigma^-1 e / 6 over all poses.
double anees(const AlignedPair& pair);
/// Final position error per travelled metre (cm/m) and final yaw error per metre (deg/m).
std::pair<double, double> drift(const AlignedPair& pair, double length);
double path_length(const std::vector<PoseSample>& poses);
double calibration_error(const SO3& S_true, const SO3& S_hat);
/// Converged if the error stays below threshold over the last 10% of the
/// series; partial if it ends lower than it started; fail otherwise.
Convergence classify_convergence(const std::vector<double>& errors, double threshold = 5.0 * M_PI / 180.0);

/// Covariance of (APE_R, APE_T) given the covariance of the left-invariant
/// (rotation, position) error of the extended pose estimate T_hat.
Matrix6d ape_covariance(const SE23& T_hat, const Matrix6d& Sigma_rot_pos);

MetricsReport evaluate_metrics(const AlignedPair& pair);

/// Writes trajectory.csv, ape.csv, calib.csv and anees.csv into dir.
void emit_plot_data(const AlignedPair& pair, const MetricsReport& report, const std::string& dir);

}  // namespace eqf_rio
