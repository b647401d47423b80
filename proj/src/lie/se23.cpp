#include "eqf_rio/lie/se23.hpp"

#include "eqf_rio/lie/left_jacobian.hpp"

namespace eqf_rio {

SE23 SE23::from_matrix(const Matrix5d& M) {
  Matrix5d pattern = M;
  pattern.topRows<3>().setZero();
  if ((pattern.bottomRightCorner<2, 2>() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      pattern.bottomLeftCorner<2, 3>().cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("SE23: matrix does not have extended-pose structure");
  }
  return SE23(SO3::from_matrix(M.topLeftCorner<3, 3>()), M.block<3, 1>(0, 3), M.block<3, 1>(0, 4));
}

SE23 SE23::exp(const Vector9d& u) {
  const Vector3d w = u.head<3>();
  const Matrix3d J = detail::so3_jacobian(w);
  return SE23(SO3::exp(w), J * u.segment<3>(3), J * u.tail<3>());
}

Vector9d SE23::log() const {
  const Vector3d w = A_.log();
  const Matrix3d Jinv = detail::so3_jacobian_inverse(w);
  Vector9d u;
  u << w, Jinv * a_, Jinv * b_;
  return u;
}

SE23 SE23::inverse() const {
  const SO3 At = A_.inverse();
  return SE23(At, -(At * a_), -(At * b_));
}

SE23 SE23::operator*(const SE23& other) const {
  return SE23(A_ * other.A_, A_ * other.a_ + a_, A_ * other.b_ + b_);
}

Matrix5d SE23::matrix() const {
  Matrix5d M = Matrix5d::Identity();
  M.topLeftCorner<3, 3>() = A_.matrix();
  M.block<3, 1>(0, 3) = a_;
  M.block<3, 1>(0, 4) = b_;
  return M;
}

Matrix9d SE23::adjoint() const {
  Matrix9d Ad = Matrix9d::Zero();
  const Matrix3d& A = A_.matrix();
  Ad.block<3, 3>(0, 0) = A;
  Ad.block<3, 3>(3, 0) = skew(a_) * A;
  Ad.block<3, 3>(3, 3) = A;
  Ad.block<3, 3>(6, 0) = skew(b_) * A;
  Ad.block<3, 3>(6, 6) = A;
  return Ad;
}

Matrix5d SE23::wedge(const Vector9d& u) {
  Matrix5d M = Matrix5d::Zero();
  M.topLeftCorner<3, 3>() = skew(u.head<3>());
  M.block<3, 1>(0, 3) = u.segment<3>(3);
  M.block<3, 1>(0, 4) = u.tail<3>();
  return M;
}

Vector9d SE23::vee(const Matrix5d& M) {
  if (M.bottomRows<2>().cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("SE23::vee: bottom rows must be zero");
  }
  Vector9d u;
  u << SO3::vee(M.topLeftCorner<3, 3>()), M.block<3, 1>(0, 3), M.block<3, 1>(0, 4);
  return u;
}

Matrix9d SE23::ad(const Vector9d& u) {
  Matrix9d a = Matrix9d::Zero();
  const Matrix3d W = skew(u.head<3>());
  a.block<3, 3>(0, 0) = W;
  a.block<3, 3>(3, 0) = skew(u.segment<3>(3));
  a.block<3, 3>(3, 3) = W;
  a.block<3, 3>(6, 0) = skew(u.tail<3>());
  a.block<3, 3>(6, 6) = W;
  return a;
}

Matrix9d SE23::left_jacobian(const Vector9d& u) { return left_jacobian_series<SE23>(u); }

}  // namespace eqf_rio
