#include "eqf_rio/lie/so3.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "eqf_rio/lie/left_jacobian.hpp"

namespace eqf_rio {

namespace {

constexpr double kSmallAngle = 1e-2;
constexpr double kLogMargin = 1e-6;

// Taylor coefficients of the Rodrigues-type functions, used below kSmallAngle
// where the closed forms lose precision to cancellation.
double coeff_sin_over(double t2) {  // sin(t)/t
  return 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0));
}
double coeff_one_minus_cos(double t2) {  // (1-cos t)/t^2
  return 0.5 - t2 / 24.0 * (1.0 - t2 / 30.0 * (1.0 - t2 / 56.0));
}
double coeff_t_minus_sin(double t2) {  // (t-sin t)/t^3
  return 1.0 / 6.0 - t2 / 120.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0));
}
double coeff_cos_quartic(double t2) {  // (t^2/2 + cos t - 1)/t^4
  return 1.0 / 24.0 - t2 / 720.0 * (1.0 - t2 / 56.0 * (1.0 - t2 / 90.0));
}

}  // namespace

SO3 SO3::from_matrix(const Matrix3d& R) {
  const double orth = (R.transpose() * R - Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (orth > 1e-9 || std::abs(R.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("SO3: matrix is not a rotation");
  }
  return SO3(R, Unchecked{});
}

SO3 SO3::from_matrix_normalized(const Matrix3d& R) {
  Eigen::JacobiSVD<Matrix3d> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3d U = svd.matrixU();
  const Matrix3d V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return SO3(U * V.transpose(), Unchecked{});
}

SO3 SO3::exp(const Vector3d& w) {
  const double t2 = w.squaredNorm();
  const Matrix3d W = skew(w);
  double a, b;
  if (t2 < kSmallAngle * kSmallAngle) {
    a = coeff_sin_over(t2);
    b = coeff_one_minus_cos(t2);
  } else {
    const double t = std::sqrt(t2);
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  return SO3(Matrix3d::Identity() + a * W + b * W * W, Unchecked{});
}

Vector3d SO3::log() const {
  const double c = std::clamp((R_.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double t = std::acos(c);
  if (t > M_PI - kLogMargin) {
    throw LogDomainError("SO3::log: rotation angle too close to pi");
  }
  const Vector3d v = 0.5 * unskew(R_ - R_.transpose());  // sin(t) * axis
  if (t < kSmallAngle) {
    return v / coeff_sin_over(t * t);
  }
  return v * (t / std::sin(t));
}

double SO3::angle() const {
  const double s = 0.5 * unskew(R_ - R_.transpose()).norm();
  const double c = (R_.trace() - 1.0) * 0.5;
  return std::atan2(s, c);
}

Vector3d SO3::vee(const Matrix3d& W) {
  if ((W + W.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("SO3::vee: matrix is not skew-symmetric");
  }
  return unskew(W);
}

Matrix3d SO3::left_jacobian(const Vector3d& w) { return left_jacobian_series<SO3>(w); }

SO3 SO3::rot_x(double angle) { return exp(Vector3d::UnitX() * angle); }
SO3 SO3::rot_y(double angle) { return exp(Vector3d::UnitY() * angle); }
SO3 SO3::rot_z(double angle) { return exp(Vector3d::UnitZ() * angle); }

namespace detail {

Matrix3d so3_jacobian(const Vector3d& w) {
  const double t2 = w.squaredNorm();
  const Matrix3d W = skew(w);
  double a, b;
  if (t2 < kSmallAngle * kSmallAngle) {
    a = coeff_one_minus_cos(t2);
    b = coeff_t_minus_sin(t2);
  } else {
    const double t = std::sqrt(t2);
    a = (1.0 - std::cos(t)) / t2;
    b = (t - std::sin(t)) / (t2 * t);
  }
  return Matrix3d::Identity() + a * W + b * W * W;
}

Matrix3d so3_jacobian_inverse(const Vector3d& w) {
  const double t2 = w.squaredNorm();
  const Matrix3d W = skew(w);
  double b;
  if (t2 < kSmallAngle * kSmallAngle) {
    // 1/t^2 - (1+cos t)/(2 t sin t) = 1/12 + t^2/720 + t^4/30240 + ...
    b = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double t = std::sqrt(t2);
    b = 1.0 / t2 - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  }
  return Matrix3d::Identity() - 0.5 * W + b * W * W;
}

Matrix3d so3_second_jacobian(const Vector3d& w) {
  const double t2 = w.squaredNorm();
  const Matrix3d W = skew(w);
  double a, b;
  if (t2 < kSmallAngle * kSmallAngle) {
    a = coeff_t_minus_sin(t2);
    b = coeff_cos_quartic(t2);
  } else {
    const double t = std::sqrt(t2);
    a = (t - std::sin(t)) / (t2 * t);
    b = (0.5 * t2 + std::cos(t) - 1.0) / (t2 * t2);
  }
  return 0.5 * Matrix3d::Identity() + a * W + b * W * W;
}

}  // namespace detail

}  // namespace eqf_rio
