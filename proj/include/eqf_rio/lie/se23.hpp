#pragma once

#include "eqf_rio/lie/se3.hpp"

namespace eqf_rio {

/// Extended pose (A, a, b): attitude, velocity, position. Embedded as the
/// 5x5 matrix [[A, a, b], [0, 1, 0], [0, 0, 1]]. Tangent coordinates are
/// ordered (rotation, velocity, position).
class SE23 {
 public:
  static constexpr int kDim = 9;
  using Tangent = Vector9d;
  using Jacobian = Matrix9d;

  SE23() = default;
  SE23(const SO3& A, const Vector3d& a, const Vector3d& b) : A_(A), a_(a), b_(b) {}

  static SE23 identity() { return SE23(); }
  static SE23 from_matrix(const Matrix5d& M);

  static SE23 exp(const Vector9d& u);
  Vector9d log() const;

  SE23 inverse() const;
  SE23 operator*(const SE23& other) const;

  const SO3& rotation() const { return A_; }
  const Vector3d& velocity() const { return a_; }
  const Vector3d& position() const { return b_; }

  Matrix5d matrix() const;
  Matrix9d adjoint() const;

  static Matrix5d wedge(const Vector9d& u);
  static Vector9d vee(const Matrix5d& M);
  static Matrix9d ad(const Vector9d& u);
  static Matrix9d left_jacobian(const Vector9d& u);

 private:
  SO3 A_;
  Vector3d a_ = Vector3d::Zero();
  Vector3d b_ = Vector3d::Zero();
};

}  // namespace eqf_rio
