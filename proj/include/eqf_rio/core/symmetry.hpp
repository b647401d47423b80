#pragma once

#include <vector>

#include "eqf_rio/lie/algebra.hpp"
#include "eqf_rio/lie/tangent_group.hpp"

namespace eqf_rio {

/// Gravity vector in the world frame (m/s^2).
inline const Vector3d kGravity(0.0, 0.0, -9.81);

/// Layout of the error vector [D(9) | delta(9) | F(6) | clones(6 each)].
inline constexpr int kIdxD = 0;
inline constexpr int kIdxDelta = 9;
inline constexpr int kIdxF = 18;
inline constexpr int kCoreDim = 24;
inline constexpr int kCloneDim = 6;
inline constexpr int kInputDim = 25;

inline constexpr int error_dimension(int clones) { return kCoreDim + kCloneDim * clones; }
inline constexpr int clone_offset(int index) { return kCoreDim + kCloneDim * index; }

struct PoseClone {
  SE3 pose;
  double stamp = 0.0;
};

/// Navigation state (R, v, p), biases (b_w, b_a, b_nu), radar extrinsics
/// L = (S, t) and the cloned radar poses.
struct SystemState {
  SE23 T;
  Vector9d b = Vector9d::Zero();
  SE3 L;
  std::vector<PoseClone> clones;

  static SystemState identity(int clone_count = 0);
  SE3 radar_pose() const { return project_to_se3(T) * L; }
};

/// Element (D, delta, F, F_1..F_k) of the symmetry group.
struct SymmetryElement {
  SE23 D;
  Vector9d delta = Vector9d::Zero();
  SE3 F;
  std::vector<SE3> clone_factors;

  static SymmetryElement identity(int clone_count = 0);
  int clone_count() const { return static_cast<int>(clone_factors.size()); }

  /// Throws std::invalid_argument on clone count mismatch.
  SymmetryElement operator*(const SymmetryElement& other) const;
  SymmetryElement inverse() const;
  /// Re-projects every rotation block onto SO(3) to stop round-off growth.
  SymmetryElement normalized() const;
};

/// Input (w_N, tau, mu). w_N = (omega, acc, nu, 1).
struct SystemInput {
  Vector10d w = unit_w();
  Vector9d tau = Vector9d::Zero();
  Vector6d mu = Vector6d::Zero();

  static Vector10d unit_w() {
    Vector10d w = Vector10d::Zero();
    w(9) = 1.0;
    return w;
  }
  static SystemInput from_imu(const Vector3d& gyro, const Vector3d& acc);

  Vector3d gyro() const { return w.head<3>(); }
  Vector3d acc() const { return w.segment<3>(3); }

  /// Stacked 25-vector (w_N, tau, mu).
  Eigen::Matrix<double, 25, 1> stacked() const;
  static SystemInput from_stacked(const Eigen::Matrix<double, 25, 1>& v);
};

/// g_N = (0, -g, 0, 1).
Vector10d gravity_input(const Vector3d& gravity = kGravity);

SystemState state_action(const SymmetryElement& X, const SystemState& xi);
SymmetryElement state_action_inverse(const SystemState& origin, const SystemState& xi);
SystemInput input_action(const SymmetryElement& X, const SystemInput& u);

SystemState discrete_dynamics(const SystemState& xi, const SystemInput& u, double dt,
                              const Vector3d& gravity = kGravity);
SymmetryElement lift(const SystemState& xi, const SystemInput& u, double dt, const Vector3d& gravity = kGravity);
SymmetryElement lifted_step(const SymmetryElement& X, const SystemState& origin, const SystemInput& u, double dt,
                            const Vector3d& gravity = kGravity);

/// Normal coordinates of e = phi(X_hat^-1, xi) around the origin.
VectorXd error_coordinates(const SymmetryElement& X_hat, const SystemState& xi, const SystemState& origin);
/// Group exponential of an error vector.
SymmetryElement error_inverse(const VectorXd& eps);
/// Group logarithm, the inverse of error_inverse.
VectorXd error_log(const SymmetryElement& E);

}  // namespace eqf_rio
