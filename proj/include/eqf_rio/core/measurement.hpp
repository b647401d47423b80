#pragma once

#include "eqf_rio/core/symmetry.hpp"
#include "eqf_rio/lie/sphere.hpp"

namespace eqf_rio {

using RowVectorXd = Eigen::RowVectorXd;
using Row7d = Eigen::Matrix<double, 1, 7>;
using Row6d = Eigen::Matrix<double, 1, 6>;

struct RadarDetection {
  int feature_id = -1;
  Vector3d p_f = Vector3d::UnitX();
  double doppler = 0.0;
};

/// Standard deviations of the Doppler noise vector (eta_w, eta_kappa, eta_rho, eta_vD).
struct DopplerNoiseSpec {
  double sigma_omega = 0.0;
  double sigma_kappa = 0.0;
  double sigma_rho = 0.0;
  double sigma_vd = 0.0;

  /// 7x7 diagonal covariance of (eta_w, eta_phi, eta_vD).
  Eigen::Matrix<double, 7, 7> doppler_covariance() const;
  /// 6x6 diagonal covariance of (eta_phi_now, eta_phi_then).
  Matrix6d point_covariance() const;
};

struct MatchObservation {
  int feature_id = -1;
  int clone_index = 0;
  Vector3d p_now = Vector3d::UnitX();
  Vector3d p_then = Vector3d::UnitX();
};

/// h_v = -(p^T/|p|) S^T (R^T v + (gyro - b_w)^ t).
double doppler_model(const SystemState& xi, const Vector3d& p_f, const Vector3d& gyro);

/// Doppler output matrix at X_hat (origin at identity). origin_input is
/// psi(X_hat^-1, u_tilde).
RowVectorXd doppler_output_matrix(const SymmetryElement& X_hat, const Vector3d& p_f,
                                  const SystemInput& origin_input);
Row7d doppler_noise_matrix(const SymmetryElement& X_hat, const Vector3d& p_f, const SystemInput& origin_input);

/// h_p = |(Pi(T) L)^-1 P_i * p_then|.
double point_constraint_model(const SystemState& xi, int clone_index, const Vector3d& p_then);
RowVectorXd point_output_matrix(const SymmetryElement& X_hat, int clone_index, const Vector3d& p_then);
Row6d point_noise_matrix(const SymmetryElement& X_hat, int clone_index, const Vector3d& p_then);

}  // namespace eqf_rio
