#pragma once

#include "eqf_rio/lie/types.hpp"

namespace eqf_rio {

/// Rotation group SO(3) stored as a 3x3 matrix.
class SO3 {
 public:
  static constexpr int kDim = 3;
  using Tangent = Vector3d;
  using Jacobian = Matrix3d;

  SO3() : R_(Matrix3d::Identity()) {}

  /// Validates orthonormality and det = +1 to 1e-9.
  static SO3 from_matrix(const Matrix3d& R);
  /// Projects an approximately orthonormal matrix onto SO(3).
  static SO3 from_matrix_normalized(const Matrix3d& R);
  static SO3 identity() { return SO3(); }

  static SO3 exp(const Vector3d& w);
  /// Throws LogDomainError when the rotation angle exceeds pi - 1e-6.
  Vector3d log() const;
  /// Geodesic angle in [0, pi]; well defined everywhere.
  double angle() const;

  SO3 inverse() const { return SO3(R_.transpose(), Unchecked{}); }
  SO3 operator*(const SO3& other) const { return SO3(R_ * other.R_, Unchecked{}); }
  Vector3d operator*(const Vector3d& x) const { return R_ * x; }

  const Matrix3d& matrix() const { return R_; }
  Matrix3d adjoint() const { return R_; }

  static Matrix3d wedge(const Vector3d& w) { return skew(w); }
  /// Throws std::invalid_argument if the matrix is not skew-symmetric to 1e-9.
  static Vector3d vee(const Matrix3d& W);
  static Matrix3d ad(const Vector3d& w) { return skew(w); }
  static Matrix3d left_jacobian(const Vector3d& w);

  static SO3 rot_x(double angle);
  static SO3 rot_y(double angle);
  static SO3 rot_z(double angle);

 private:
  struct Unchecked {};
  SO3(const Matrix3d& R, Unchecked) : R_(R) {}

  Matrix3d R_;
};

namespace detail {

/// Closed-form SO(3) left Jacobian (I + (1-cos)/t^2 W + (t-sin)/t^3 W^2).
Matrix3d so3_jacobian(const Vector3d& w);
Matrix3d so3_jacobian_inverse(const Vector3d& w);
/// sum_k W^k/(k+2)!, the second-order integral that appears in the Gal(3)
/// exponential.
Matrix3d so3_second_jacobian(const Vector3d& w);

}  // namespace detail

}  // namespace eqf_rio
