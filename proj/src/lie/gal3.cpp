#include "eqf_rio/lie/gal3.hpp"

#include "eqf_rio/lie/left_jacobian.hpp"

namespace eqf_rio {

Gal3 Gal3::from_matrix(const Matrix5d& M) {
  Eigen::Matrix<double, 2, 5> expected;
  expected << 0, 0, 0, 1, M(3, 4),
              0, 0, 0, 0, 1;
  if ((M.bottomRows<2>() - expected).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("Gal3: matrix does not have Galilean structure");
  }
  return Gal3(SO3::from_matrix(M.topLeftCorner<3, 3>()), M.block<3, 1>(0, 3), M.block<3, 1>(0, 4), M(3, 4));
}

Gal3 Gal3::exp(const Vector10d& u) {
  const Vector3d w = u.head<3>();
  const Vector3d alpha = u.segment<3>(3);
  const Vector3d beta = u.segment<3>(6);
  const double gamma = u(9);
  const Matrix3d J = detail::so3_jacobian(w);
  const Matrix3d H = detail::so3_second_jacobian(w);
  return Gal3(SO3::exp(w), J * alpha, J * beta + gamma * (H * alpha), gamma);
}

Vector10d Gal3::log() const {
  const Vector3d w = A_.log();
  const Matrix3d Jinv = detail::so3_jacobian_inverse(w);
  const Matrix3d H = detail::so3_second_jacobian(w);
  const Vector3d alpha = Jinv * a_;
  Vector10d u;
  u << w, alpha, Jinv * (b_ - c_ * (H * alpha)), c_;
  return u;
}

Gal3 Gal3::inverse() const {
  const SO3 At = A_.inverse();
  return Gal3(At, -(At * a_), -(At * (b_ - c_ * a_)), -c_);
}

Gal3 Gal3::operator*(const Gal3& other) const {
  return Gal3(A_ * other.A_, A_ * other.a_ + a_, A_ * other.b_ + a_ * other.c_ + b_, c_ + other.c_);
}

Matrix5d Gal3::matrix() const {
  Matrix5d M = Matrix5d::Identity();
  M.topLeftCorner<3, 3>() = A_.matrix();
  M.block<3, 1>(0, 3) = a_;
  M.block<3, 1>(0, 4) = b_;
  M(3, 4) = c_;
  return M;
}

Matrix10d Gal3::adjoint() const {
  Matrix10d Ad = Matrix10d::Zero();
  const Matrix3d& A = A_.matrix();
  Ad.block<3, 3>(0, 0) = A;
  Ad.block<3, 3>(3, 0) = skew(a_) * A;
  Ad.block<3, 3>(3, 3) = A;
  Ad.block<3, 3>(6, 0) = skew(b_ - c_ * a_) * A;
  Ad.block<3, 3>(6, 3) = -c_ * A;
  Ad.block<3, 3>(6, 6) = A;
  Ad.block<3, 1>(6, 9) = a_;
  Ad(9, 9) = 1.0;
  return Ad;
}

Matrix5d Gal3::wedge(const Vector10d& u) {
  Matrix5d M = Matrix5d::Zero();
  M.topLeftCorner<3, 3>() = skew(u.head<3>());
  M.block<3, 1>(0, 3) = u.segment<3>(3);
  M.block<3, 1>(0, 4) = u.segment<3>(6);
  M(3, 4) = u(9);
  return M;
}

Vector10d Gal3::vee(const Matrix5d& M) {
  Matrix5d rest = M;
  rest.topRows<3>().setZero();
  rest(3, 4) = 0.0;
  if (rest.cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("Gal3::vee: matrix is not in the Galilean algebra");
  }
  Vector10d u;
  u << SO3::vee(M.topLeftCorner<3, 3>()), M.block<3, 1>(0, 3), M.block<3, 1>(0, 4), M(3, 4);
  return u;
}

Matrix10d Gal3::ad(const Vector10d& u) {
  Matrix10d a = Matrix10d::Zero();
  const Matrix3d W = skew(u.head<3>());
  a.block<3, 3>(0, 0) = W;
  a.block<3, 3>(3, 0) = skew(u.segment<3>(3));
  a.block<3, 3>(3, 3) = W;
  a.block<3, 3>(6, 0) = skew(u.segment<3>(6));
  a.block<3, 3>(6, 3) = -u(9) * Matrix3d::Identity();
  a.block<3, 3>(6, 6) = W;
  a.block<3, 1>(6, 9) = u.segment<3>(3);
  return a;
}

Matrix10d Gal3::left_jacobian(const Vector10d& u) { return left_jacobian_series<Gal3>(u); }

}  // namespace eqf_rio
