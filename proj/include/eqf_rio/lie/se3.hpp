#pragma once

#include "eqf_rio/lie/so3.hpp"

namespace eqf_rio {

/// Rigid transformation (E, f). Tangent coordinates are ordered
/// (rotation, translation).
class SE3 {
 public:
  static constexpr int kDim = 6;
  using Tangent = Vector6d;
  using Jacobian = Matrix6d;

  SE3() = default;
  SE3(const SO3& rotation, const Vector3d& translation) : E_(rotation), f_(translation) {}

  static SE3 identity() { return SE3(); }
  /// Validates the homogeneous structure and the rotation block.
  static SE3 from_matrix(const Matrix4d& M);

  static SE3 exp(const Vector6d& u);
  Vector6d log() const;

  SE3 inverse() const;
  SE3 operator*(const SE3& other) const;
  /// Point transformation P * x = E x + f.
  Vector3d operator*(const Vector3d& x) const { return E_ * x + f_; }

  const SO3& rotation() const { return E_; }
  const Vector3d& translation() const { return f_; }

  Matrix4d matrix() const;
  Matrix6d adjoint() const;

  static Matrix4d wedge(const Vector6d& u);
  static Vector6d vee(const Matrix4d& M);
  static Matrix6d ad(const Vector6d& u);
  static Matrix6d left_jacobian(const Vector6d& u);

 private:
  SO3 E_;
  Vector3d f_ = Vector3d::Zero();
};

}  // namespace eqf_rio
