#pragma once

#include <map>
#include <vector>

#include "eqf_rio/core/measurement.hpp"

namespace eqf_rio {

using Matrix24d = Eigen::Matrix<double, 24, 24>;
using Matrix24x25d = Eigen::Matrix<double, 24, 25>;
using Matrix25d = Eigen::Matrix<double, 25, 25>;

/// Continuous-time noise densities of the 25-dimensional input.
struct ProcessNoise {
  Matrix25d Q = Matrix25d::Zero();

  /// Builds a diagonal Q from densities (per sqrt(Hz)). The unit slot of w_N
  /// is always noise free.
  static ProcessNoise from_densities(double gyro, double acc, double gyro_bias_walk, double acc_bias_walk,
                                     double calib_rot_walk = 0.0, double calib_trans_walk = 0.0,
                                     double virtual_velocity = 0.0, double virtual_bias_walk = 0.0);
};

struct FilterConfig {
  double dt_max = 0.1;
  int k_max = 10;
  bool gate_doppler = false;
  bool gate_msc = true;
  double gate_threshold = 6.63;
  Vector3d gravity = kGravity;
  DopplerNoiseSpec radar_noise;
  ProcessNoise process_noise;
};

/// Timestamp of a clone and the still-unmatched features observed with it
/// (feature id -> radar-frame point).
struct CloneRecord {
  double stamp = 0.0;
  std::map<int, Vector3d> active_features;
};

struct FilterBelief {
  SymmetryElement X;
  MatrixXd Sigma;
  std::vector<CloneRecord> registry;
  SystemInput last_input;
  double last_time = 0.0;

  int clone_count() const { return X.clone_count(); }
  /// Current estimate phi(X, origin).
  SystemState state() const;
};

struct UpdateReport {
  int rows_total = 0;
  int rows_used = 0;
  int rows_gated = 0;
  bool singular = false;
};

/// State origin at the identity with k identity clones.
SystemState identity_origin(int clone_count);

/// Throws std::invalid_argument if Sigma_init is not a symmetric PSD 24x24 matrix.
FilterBelief initialize(const SystemState& xi_init, const MatrixXd& Sigma_init, double t0 = 0.0);

Matrix24d build_A(const SystemInput& origin_input, double dt, const Vector3d& gravity = kGravity);
Matrix24x25d build_B(const SystemInput& origin_input, const SymmetryElement& X_hat, double dt,
                     const Vector3d& gravity = kGravity);
/// Augmented A (clone diagonal identity) and B (zero clone rows).
MatrixXd augment_A(const Matrix24d& A, int clone_count);
MatrixXd augment_B(const Matrix24x25d& B, int clone_count);

/// Throws std::invalid_argument ("bad timestep") unless 0 < dt <= dt_max.
void propagate(FilterBelief& belief, const SystemInput& u_tilde, double dt, const FilterConfig& config);

/// Stacked Doppler update. gyro is the most recent gyro sample.
UpdateReport update_doppler(FilterBelief& belief, const std::vector<RadarDetection>& scan, const Vector3d& gyro,
                            const FilterConfig& config);
UpdateReport update_msc(FilterBelief& belief, const std::vector<MatchObservation>& matches,
                        const FilterConfig& config);

/// Numerical Jacobian of the error of a new clone of the current radar pose
/// with respect to the current error.
MatrixXd clone_jacobian(const SymmetryElement& X_hat);

/// Throws std::length_error when the window is full.
void clone_augment(FilterBelief& belief, double stamp, std::map<int, Vector3d> features, int k_max);
/// Throws std::out_of_range for an invalid index.
void clone_marginalize(FilterBelief& belief, int clone_index);

/// Applies a correction Delta as X <- exp(Delta) X.
void apply_correction(FilterBelief& belief, const VectorXd& delta);

}  // namespace eqf_rio
