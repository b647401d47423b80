#pragma once

#include "eqf_rio/lie/se23.hpp"

namespace eqf_rio {

/// Galilean group G(3): element (A, a, b, c) embedded as
///
///   [[A, a, b],
///    [0, 1, c],
///    [0, 0, 1]]
///
/// with algebra [[w^, alpha, beta], [0, 0, gamma], [0, 0, 0]]. Tangent
/// coordinates are ordered (rotation, velocity, position, time).
///
/// With this embedding exp(-g_N dt) T exp((w_N - b) dt) reproduces the
/// classical strapdown update p+ = p + v dt + g dt^2/2 + R(...), v+ = v + g dt + R(...).
class Gal3 {
 public:
  static constexpr int kDim = 10;
  using Tangent = Vector10d;
  using Jacobian = Matrix10d;

  Gal3() = default;
  Gal3(const SO3& A, const Vector3d& a, const Vector3d& b, double c) : A_(A), a_(a), b_(b), c_(c) {}

  static Gal3 identity() { return Gal3(); }
  static Gal3 from_matrix(const Matrix5d& M);

  static Gal3 exp(const Vector10d& u);
  Vector10d log() const;

  Gal3 inverse() const;
  Gal3 operator*(const Gal3& other) const;

  const SO3& rotation() const { return A_; }
  const Vector3d& velocity() const { return a_; }
  const Vector3d& position() const { return b_; }
  double time() const { return c_; }

  Matrix5d matrix() const;
  Matrix10d adjoint() const;

  static Matrix5d wedge(const Vector10d& u);
  static Vector10d vee(const Matrix5d& M);
  static Matrix10d ad(const Vector10d& u);
  static Matrix10d left_jacobian(const Vector10d& u);

 private:
  SO3 A_;
  Vector3d a_ = Vector3d::Zero();
  Vector3d b_ = Vector3d::Zero();
  double c_ = 0.0;
};

}  // namespace eqf_rio
