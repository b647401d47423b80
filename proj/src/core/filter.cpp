#include "eqf_rio/core/filter.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <string>

namespace eqf_rio {

namespace {

void symmetrize(MatrixXd& S) { S = 0.5 * (S + S.transpose()).eval(); }

/// Stacked EKF-style correction shared by the Doppler and MSC updates.
/// noise_cov is the (block-diagonal) D R D^T.
UpdateReport stacked_update(FilterBelief& belief, const MatrixXd& C, const VectorXd& r, const VectorXd& noise_var,
                            bool gate, double threshold) {
  UpdateReport report;
  report.rows_total = static_cast<int>(r.size());
  const MatrixXd& P = belief.Sigma;

  std::vector<int> keep;
  keep.reserve(r.size());
  const MatrixXd PCt = P * C.transpose();
  for (int i = 0; i < r.size(); ++i) {
    if (gate) {
      const double s = C.row(i).dot(PCt.col(i)) + noise_var(i);
      if (!(s > 0.0) || r(i) * r(i) / s > threshold) {
        ++report.rows_gated;
        continue;
      }
    }
    keep.push_back(i);
  }
  report.rows_used = static_cast<int>(keep.size());
  if (keep.empty()) return report;

  const int m = static_cast<int>(keep.size());
  MatrixXd Ck(m, C.cols());
  MatrixXd PCtk(P.rows(), m);
  VectorXd rk(m);
  VectorXd nk(m);
  for (int j = 0; j < m; ++j) {
    Ck.row(j) = C.row(keep[j]);
    PCtk.col(j) = PCt.col(keep[j]);
    rk(j) = r(keep[j]);
    nk(j) = noise_var(keep[j]);
  }

  MatrixXd S = Ck * PCtk;
  S.diagonal() += nk;
  symmetrize(S);
  const Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    report.singular = true;
    report.rows_used = 0;
    return report;
  }
  const MatrixXd K = llt.solve(PCtk.transpose()).transpose();
  const VectorXd delta = K * rk;
  belief.Sigma = P - K * PCtk.transpose();
  symmetrize(belief.Sigma);
  apply_correction(belief, delta);
  return report;
}

}  // namespace

ProcessNoise ProcessNoise::from_densities(double gyro, double acc, double gyro_bias_walk, double acc_bias_walk,
                                          double calib_rot_walk, double calib_trans_walk, double virtual_velocity,
                                          double virtual_bias_walk) {
  Eigen::Matrix<double, 25, 1> d = Eigen::Matrix<double, 25, 1>::Zero();
  d.segment<3>(0).setConstant(gyro * gyro);
  d.segment<3>(3).setConstant(acc * acc);
  d.segment<3>(6).setConstant(virtual_velocity * virtual_velocity);
  d.segment<3>(10).setConstant(gyro_bias_walk * gyro_bias_walk);
  d.segment<3>(13).setConstant(acc_bias_walk * acc_bias_walk);
  d.segment<3>(16).setConstant(virtual_bias_walk * virtual_bias_walk);
  d.segment<3>(19).setConstant(calib_rot_walk * calib_rot_walk);
  d.segment<3>(22).setConstant(calib_trans_walk * calib_trans_walk);
  ProcessNoise noise;
  noise.Q = d.asDiagonal();
  return noise;
}

SystemState FilterBelief::state() const {
  SystemState xi = state_action(X, identity_origin(clone_count()));
  for (int i = 0; i < clone_count() && i < static_cast<int>(registry.size()); ++i) {
    xi.clones[i].stamp = registry[i].stamp;
  }
  return xi;
}

SystemState identity_origin(int clone_count) { return SystemState::identity(clone_count); }

FilterBelief initialize(const SystemState& xi_init, const MatrixXd& Sigma_init, double t0) {
  if (Sigma_init.rows() != kCoreDim || Sigma_init.cols() != kCoreDim) {
    throw std::invalid_argument("initial covariance must be 24x24");
  }
  if (!xi_init.clones.empty()) throw std::invalid_argument("initial state must not carry clones");
  if ((Sigma_init - Sigma_init.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("initial covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Sigma_init, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) throw std::invalid_argument("initial covariance is not PSD");

  FilterBelief belief;
  belief.X = state_action_inverse(identity_origin(0), xi_init);
  belief.Sigma = Sigma_init;
  belief.last_time = t0;
  return belief;
}

Matrix24d build_A(const SystemInput& origin_input, double dt, const Vector3d& gravity) {
  const Vector10d gN = gravity_input(gravity);
  const Vector10d w = origin_input.w;
  const Gal3 Gg = Gal3::exp(-gN * dt);
  const Gal3 Gw = Gal3::exp(w * dt);
  const Matrix9d Gamma = map_theta(Gg.adjoint());
  const Matrix9d Upsilon = map_theta(Gw.adjoint());
  const Matrix9d A1 = Gamma * map_theta(Gal3::left_jacobian(w * dt)) * dt;
  const Matrix6d A2 = project_to_se3(Gg * Gw).adjoint();
  const Matrix9d GU = Gamma * Upsilon;

  Matrix24d A = Matrix24d::Zero();
  A.block<9, 9>(0, 0) = Gamma;
  A.block<9, 9>(0, 9) = A1;
  A.block<9, 9>(9, 9) = GU;
  A.block<6, 9>(18, 0) = map_xi(Gamma - GU);
  A.block<6, 9>(18, 9) = map_xi(A1);
  A.block<6, 6>(18, 18) = A2;
  return A;
}

Matrix24x25d build_B(const SystemInput& origin_input, const SymmetryElement& X_hat, double dt,
                     const Vector3d& gravity) {
  const Vector10d gN = gravity_input(gravity);
  const Vector10d w = origin_input.w;
  const Gal3 Gg = Gal3::exp(-gN * dt);
  const Gal3 Gw = Gal3::exp(w * dt);
  const Matrix9d GU = map_theta(Gg.adjoint()) * map_theta(Gw.adjoint());
  const Matrix6d A2 = project_to_se3(Gg * Gw).adjoint();
  const Matrix10d inner = -Gg.adjoint() * Gal3::left_jacobian(w * dt) * project_to_gal3(X_hat.D).adjoint() * dt;
  const Matrix9x10d B1 = map_omega(inner);
  const Matrix6d B2 = -A2 * SE3::left_jacobian(origin_input.mu * dt) * X_hat.F.adjoint() * dt;

  Matrix24x25d B = Matrix24x25d::Zero();
  B.block<9, 10>(0, 0) = B1;
  B.block<9, 9>(9, 10) = GU * X_hat.D.adjoint() * dt;
  B.block<6, 10>(18, 0) = map_xi(B1);
  B.block<6, 6>(18, 19) = B2;
  return B;
}

MatrixXd augment_A(const Matrix24d& A, int clone_count) {
  const int n = error_dimension(clone_count);
  MatrixXd Aa = MatrixXd::Identity(n, n);
  Aa.topLeftCorner<24, 24>() = A;
  return Aa;
}

MatrixXd augment_B(const Matrix24x25d& B, int clone_count) {
  MatrixXd Ba = MatrixXd::Zero(error_dimension(clone_count), kInputDim);
  Ba.topRows<24>() = B;
  return Ba;
}

void propagate(FilterBelief& belief, const SystemInput& u_tilde, double dt, const FilterConfig& config) {
  if (!(dt > 0.0) || dt > config.dt_max) {
    throw std::invalid_argument("bad timestep: " + std::to_string(dt));
  }
  const SystemInput origin_input = input_action(belief.X.inverse(), u_tilde);
  const Matrix24d A = build_A(origin_input, dt, config.gravity);
  const Matrix24x25d B = build_B(origin_input, belief.X, dt, config.gravity);

  // Clone rows of A are identity and clone rows of B are zero, so only the
  // core block and the core/clone cross terms change.
  MatrixXd& P = belief.Sigma;
  const int n = static_cast<int>(P.rows());
  const int nc = n - kCoreDim;
  Matrix24d core = A * P.topLeftCorner<24, 24>() * A.transpose() + B * config.process_noise.Q * B.transpose() / dt;
  P.topLeftCorner<24, 24>() = 0.5 * (core + core.transpose());
  if (nc > 0) {
    const MatrixXd cross = A * P.topRightCorner(kCoreDim, nc);
    P.topRightCorner(kCoreDim, nc) = cross;
    P.bottomLeftCorner(nc, kCoreDim) = cross.transpose();
  }

  belief.X = lifted_step(belief.X, identity_origin(belief.clone_count()), u_tilde, dt, config.gravity);
  belief.last_input = u_tilde;
  belief.last_time += dt;
}

void apply_correction(FilterBelief& belief, const VectorXd& delta) {
  belief.X = (error_inverse(delta) * belief.X).normalized();
}

UpdateReport update_doppler(FilterBelief& belief, const std::vector<RadarDetection>& scan, const Vector3d& gyro,
                            const FilterConfig& config) {
  const int m = static_cast<int>(scan.size());
  if (m == 0) return {};
  const int n = static_cast<int>(belief.Sigma.rows());
  SystemInput u = belief.last_input;
  u.w.head<3>() = gyro;
  const SystemInput origin_input = input_action(belief.X.inverse(), u);
  const SystemState xi_hat = belief.state();
  const Eigen::Matrix<double, 7, 7> R = config.radar_noise.doppler_covariance();

  MatrixXd C(m, n);
  VectorXd r(m);
  VectorXd var(m);
  for (int i = 0; i < m; ++i) {
    const RadarDetection& det = scan[i];
    C.row(i) = doppler_output_matrix(belief.X, det.p_f, origin_input);
    const Row7d D = doppler_noise_matrix(belief.X, det.p_f, origin_input);
    var(i) = D * R * D.transpose();
    r(i) = det.doppler - doppler_model(xi_hat, det.p_f, gyro);
  }
  return stacked_update(belief, C, r, var, config.gate_doppler, config.gate_threshold);
}

UpdateReport update_msc(FilterBelief& belief, const std::vector<MatchObservation>& matches,
                        const FilterConfig& config) {
  const int m = static_cast<int>(matches.size());
  if (m == 0) return {};
  const int n = static_cast<int>(belief.Sigma.rows());
  const SystemState xi_hat = belief.state();
  const Matrix6d R = config.radar_noise.point_covariance();

  MatrixXd C(m, n);
  VectorXd r(m);
  VectorXd var(m);
  for (int i = 0; i < m; ++i) {
    const MatchObservation& obs = matches[i];
    C.row(i) = point_output_matrix(belief.X, obs.clone_index, obs.p_then);
    const Row6d D = point_noise_matrix(belief.X, obs.clone_index, obs.p_then);
    var(i) = D * R * D.transpose();
    r(i) = obs.p_now.norm() - point_constraint_model(xi_hat, obs.clone_index, obs.p_then);
  }
  return stacked_update(belief, C, r, var, config.gate_msc, config.gate_threshold);
}

MatrixXd clone_jacobian(const SymmetryElement& X_hat) {
  const int k = X_hat.clone_count();
  const int n = error_dimension(k);
  const SystemState origin = identity_origin(k);
  const SE3 clone_hat_inv = state_action(X_hat, origin).radar_pose().inverse();
  constexpr double h = 1e-6;

  auto clone_error = [&](const VectorXd& eps) {
    const SystemState xi = state_action(error_inverse(eps) * X_hat, origin);
    return Vector6d((xi.radar_pose() * clone_hat_inv).log());
  };

  MatrixXd J(kCloneDim, n);
  VectorXd eps = VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    eps(j) = h;
    const Vector6d plus = clone_error(eps);
    eps(j) = -h;
    const Vector6d minus = clone_error(eps);
    eps(j) = 0.0;
    J.col(j) = (plus - minus) / (2.0 * h);
  }
  return J;
}

void clone_augment(FilterBelief& belief, double stamp, std::map<int, Vector3d> features, int k_max) {
  const int k = belief.clone_count();
  if (k >= k_max) throw std::length_error("clone window full");
  const int n = error_dimension(k);
  const MatrixXd Jc = clone_jacobian(belief.X);

  const SE3 radar_pose = state_action(belief.X, identity_origin(k)).radar_pose();
  belief.X.clone_factors.push_back(radar_pose);
  belief.registry.push_back({stamp, std::move(features)});

  const MatrixXd cross = Jc * belief.Sigma;
  MatrixXd P(n + kCloneDim, n + kCloneDim);
  P.topLeftCorner(n, n) = belief.Sigma;
  P.bottomLeftCorner(kCloneDim, n) = cross;
  P.topRightCorner(n, kCloneDim) = cross.transpose();
  Matrix6d block = cross * Jc.transpose();
  P.bottomRightCorner<6, 6>() = 0.5 * (block + block.transpose());
  belief.Sigma = std::move(P);
}

void clone_marginalize(FilterBelief& belief, int clone_index) {
  const int k = belief.clone_count();
  if (clone_index < 0 || clone_index >= k) {
    throw std::out_of_range("invalid clone index " + std::to_string(clone_index));
  }
  const int n = error_dimension(k);
  const int start = clone_offset(clone_index);
  const int tail = n - start - kCloneDim;

  MatrixXd P(n - kCloneDim, n - kCloneDim);
  P.topLeftCorner(start, start) = belief.Sigma.topLeftCorner(start, start);
  if (tail > 0) {
    P.topRightCorner(start, tail) = belief.Sigma.topRightCorner(start, tail);
    P.bottomLeftCorner(tail, start) = belief.Sigma.bottomLeftCorner(tail, start);
    P.bottomRightCorner(tail, tail) = belief.Sigma.bottomRightCorner(tail, tail);
  }
  belief.Sigma = std::move(P);
  belief.X.clone_factors.erase(belief.X.clone_factors.begin() + clone_index);
  if (clone_index < static_cast<int>(belief.registry.size())) {
    belief.registry.erase(belief.registry.begin() + clone_index);
  }
}

}  // namespace eqf_rio
