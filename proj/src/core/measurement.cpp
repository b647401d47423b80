#include "eqf_rio/core/measurement.hpp"

#include <string>

namespace eqf_rio {

namespace {

void check_clone(int index, int count) {
  if (index < 0 || index >= count) {
    throw std::out_of_range("invalid clone index " + std::to_string(index) + " (have " + std::to_string(count) +
                            ")");
  }
}

void check_point(const Vector3d& p) {
  if (!(p.norm() > kMinRange)) throw std::invalid_argument("degenerate point");
}

}  // namespace

Eigen::Matrix<double, 7, 7> DopplerNoiseSpec::doppler_covariance() const {
  Eigen::Matrix<double, 7, 1> d;
  d << Vector3d::Constant(sigma_omega * sigma_omega), sigma_kappa * sigma_kappa,
      Eigen::Vector2d::Constant(sigma_rho * sigma_rho), sigma_vd * sigma_vd;
  return d.asDiagonal();
}

Matrix6d DopplerNoiseSpec::point_covariance() const {
  Vector6d d;
  d << sigma_kappa * sigma_kappa, sigma_rho * sigma_rho, sigma_rho * sigma_rho, sigma_kappa * sigma_kappa,
      sigma_rho * sigma_rho, sigma_rho * sigma_rho;
  return d.asDiagonal();
}

double doppler_model(const SystemState& xi, const Vector3d& p_f, const Vector3d& gyro) {
  check_point(p_f);
  const Matrix3d& R = xi.T.rotation().matrix();
  const Matrix3d& S = xi.L.rotation().matrix();
  const Vector3d vel = R.transpose() * xi.T.velocity() + (gyro - xi.b.head<3>()).cross(xi.L.translation());
  return -(p_f.normalized()).dot(S.transpose() * vel);
}

RowVectorXd doppler_output_matrix(const SymmetryElement& X_hat, const Vector3d& p_f,
                                  const SystemInput& origin_input) {
  check_point(p_f);
  const Matrix3d& E = X_hat.F.rotation().matrix();
  const Vector3d& f = X_hat.F.translation();
  const Vector3d& a = X_hat.D.velocity();
  const Vector3d& b = X_hat.D.position();
  const Matrix3d W = skew(origin_input.gyro());

  const Eigen::RowVector3d Psi = -p_f.normalized().transpose() * E.transpose();
  const Eigen::RowVector3d C1 = Psi * (W * skew(f) - skew(a + W * (f - b)));
  const Eigen::RowVector3d C2 = -Psi * W;

  RowVectorXd C = RowVectorXd::Zero(error_dimension(X_hat.clone_count()));
  C.segment<3>(kIdxD) = C1;
  C.segment<3>(kIdxD + 3) = Psi;
  C.segment<3>(kIdxD + 6) = C2;
  C.segment<3>(kIdxDelta) = -Psi * skew(f - b);
  C.segment<3>(kIdxF) = -C1;
  C.segment<3>(kIdxF + 3) = -C2;
  return C;
}

Row7d doppler_noise_matrix(const SymmetryElement& X_hat, const Vector3d& p_f, const SystemInput& origin_input) {
  check_point(p_f);
  const Matrix3d& A = X_hat.D.rotation().matrix();
  const Matrix3d& E = X_hat.F.rotation().matrix();
  const Vector3d& f = X_hat.F.translation();
  const Vector3d& a = X_hat.D.velocity();
  const Vector3d& b = X_hat.D.position();
  const Vector3d w = origin_input.gyro();

  const double n = p_f.norm();
  const Eigen::RowVector3d Psi = -p_f.transpose() / n * E.transpose();
  const Matrix3d tangential = Matrix3d::Identity() - p_f * p_f.transpose() / (n * n);
  const Eigen::RowVector3d D1 =
      (E.transpose() * (a + w.cross(f - b))).transpose() * tangential * sphere_jacobian(p_f) / n;

  Row7d D;
  D << Psi * skew(f - b) * A, D1, 1.0;
  return D;
}

double point_constraint_model(const SystemState& xi, int clone_index, const Vector3d& p_then) {
  check_clone(clone_index, static_cast<int>(xi.clones.size()));
  return (xi.radar_pose().inverse() * (xi.clones[clone_index].pose * p_then)).norm();
}

RowVectorXd point_output_matrix(const SymmetryElement& X_hat, int clone_index, const Vector3d& p_then) {
  check_clone(clone_index, X_hat.clone_count());
  const Vector3d world = X_hat.clone_factors[clone_index] * p_then;
  const Vector3d q = X_hat.F.inverse() * world;
  const Eigen::RowVector3d H = q.normalized().transpose() * X_hat.F.rotation().matrix().transpose();
  const Eigen::RowVector3d C1 = H * skew(world);

  RowVectorXd C = RowVectorXd::Zero(error_dimension(X_hat.clone_count()));
  const int ci = clone_offset(clone_index);
  C.segment<3>(kIdxF) = C1;
  C.segment<3>(kIdxF + 3) = -H;
  C.segment<3>(ci) = -C1;
  C.segment<3>(ci + 3) = H;
  return C;
}

Row6d point_noise_matrix(const SymmetryElement& X_hat, int clone_index, const Vector3d& p_then) {
  check_clone(clone_index, X_hat.clone_count());
  const SE3& Fi = X_hat.clone_factors[clone_index];
  const Vector3d q = X_hat.F.inverse() * (Fi * p_then);
  const Eigen::RowVector3d H = q.normalized().transpose() * X_hat.F.rotation().matrix().transpose();
  Row6d D;
  D << 1.0, 0.0, 0.0, -H * Fi.rotation().matrix() * sphere_jacobian(p_then);
  return D;
}

}  // namespace eqf_rio
