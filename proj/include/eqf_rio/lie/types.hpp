#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace eqf_rio {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector9d = Eigen::Matrix<double, 9, 1>;
using Vector10d = Eigen::Matrix<double, 10, 1>;
using Matrix4d = Eigen::Matrix4d;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix9d = Eigen::Matrix<double, 9, 9>;
using Matrix10d = Eigen::Matrix<double, 10, 10>;
using Matrix9x10d = Eigen::Matrix<double, 9, 10>;

/// Thrown when a logarithm is requested outside the injectivity radius.
class LogDomainError : public std::domain_error {
 public:
  explicit LogDomainError(const std::string& what) : std::domain_error(what) {}
};

inline Matrix3d skew(const Vector3d& w) {
  Matrix3d W;
  W << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return W;
}

/// Inverse of skew(); reads the lower-triangular entries only.
inline Vector3d unskew(const Matrix3d& W) { return {W(2, 1), W(0, 2), W(1, 0)}; }

}  // namespace eqf_rio
