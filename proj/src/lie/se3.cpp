#include "eqf_rio/lie/se3.hpp"

#include "eqf_rio/lie/left_jacobian.hpp"

namespace eqf_rio {

SE3 SE3::from_matrix(const Matrix4d& M) {
  if ((M.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("SE3: bottom row must be [0 0 0 1]");
  }
  return SE3(SO3::from_matrix(M.topLeftCorner<3, 3>()), M.topRightCorner<3, 1>());
}

SE3 SE3::exp(const Vector6d& u) {
  const Vector3d w = u.head<3>();
  return SE3(SO3::exp(w), detail::so3_jacobian(w) * u.tail<3>());
}

Vector6d SE3::log() const {
  const Vector3d w = E_.log();
  Vector6d u;
  u << w, detail::so3_jacobian_inverse(w) * f_;
  return u;
}

SE3 SE3::inverse() const {
  const SO3 Et = E_.inverse();
  return SE3(Et, -(Et * f_));
}

SE3 SE3::operator*(const SE3& other) const {
  return SE3(E_ * other.E_, E_ * other.f_ + f_);
}

Matrix4d SE3::matrix() const {
  Matrix4d M = Matrix4d::Identity();
  M.topLeftCorner<3, 3>() = E_.matrix();
  M.topRightCorner<3, 1>() = f_;
  return M;
}

Matrix6d SE3::adjoint() const {
  Matrix6d Ad = Matrix6d::Zero();
  const Matrix3d& E = E_.matrix();
  Ad.block<3, 3>(0, 0) = E;
  Ad.block<3, 3>(3, 0) = skew(f_) * E;
  Ad.block<3, 3>(3, 3) = E;
  return Ad;
}

Matrix4d SE3::wedge(const Vector6d& u) {
  Matrix4d M = Matrix4d::Zero();
  M.topLeftCorner<3, 3>() = skew(u.head<3>());
  M.topRightCorner<3, 1>() = u.tail<3>();
  return M;
}

Vector6d SE3::vee(const Matrix4d& M) {
  if (M.row(3).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("SE3::vee: bottom row must be zero");
  }
  Vector6d u;
  u << SO3::vee(M.topLeftCorner<3, 3>()), M.topRightCorner<3, 1>();
  return u;
}

Matrix6d SE3::ad(const Vector6d& u) {
  Matrix6d a = Matrix6d::Zero();
  const Matrix3d W = skew(u.head<3>());
  a.block<3, 3>(0, 0) = W;
  a.block<3, 3>(3, 0) = skew(u.tail<3>());
  a.block<3, 3>(3, 3) = W;
  return a;
}

Matrix6d SE3::left_jacobian(const Vector6d& u) { return left_jacobian_series<SE3>(u); }

}  // namespace eqf_rio
