#pragma once

#include "eqf_rio/lie/se23.hpp"

namespace eqf_rio {

using Vector18d = Eigen::Matrix<double, 18, 1>;

/// Left-trivialized tangent group SE2(3) ⋉ se2(3) with product
/// (A, a)(B, b) = (AB, a + Ad_A b).
class TangentGroup {
 public:
  static constexpr int kDim = 18;
  using Tangent = Vector18d;

  TangentGroup() = default;
  TangentGroup(const SE23& D, const Vector9d& delta) : D_(D), delta_(delta) {}

  static TangentGroup identity() { return TangentGroup(); }

  /// exp(u_D, u_delta) = (exp(u_D), J_l(u_D) u_delta).
  static TangentGroup exp(const Vector18d& u);
  /// Inverse of exp; solves J_l(log D) x = delta instead of inverting J_l.
  Vector18d log() const;

  TangentGroup inverse() const;
  TangentGroup operator*(const TangentGroup& other) const;

  const SE23& base() const { return D_; }
  const Vector9d& fiber() const { return delta_; }

 private:
  SE23 D_;
  Vector9d delta_ = Vector9d::Zero();
};

}  // namespace eqf_rio
