#include "eqf_rio/core/symmetry.hpp"

#include <string>

namespace eqf_rio {

namespace {

void require_same_count(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw std::invalid_argument(std::string(where) + ": clone count mismatch (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

Vector10d embed(const Vector9d& v) { return project_to_gal3(v); }

}  // namespace

SystemState SystemState::identity(int clone_count) {
  SystemState xi;
  for (int i = 0; i < clone_count; ++i) xi.clones.push_back({SE3(), static_cast<double>(i)});
  return xi;
}

SymmetryElement SymmetryElement::identity(int clone_count) {
  SymmetryElement X;
  X.clone_factors.assign(clone_count, SE3());
  return X;
}

SymmetryElement SymmetryElement::operator*(const SymmetryElement& other) const {
  require_same_count(clone_factors.size(), other.clone_factors.size(), "SymmetryElement::operator*");
  SymmetryElement out;
  out.D = D * other.D;
  out.delta = delta + D.adjoint() * other.delta;
  out.F = F * other.F;
  out.clone_factors.reserve(clone_factors.size());
  for (std::size_t i = 0; i < clone_factors.size(); ++i) {
    out.clone_factors.push_back(clone_factors[i] * other.clone_factors[i]);
  }
  return out;
}

SymmetryElement SymmetryElement::normalized() const {
  auto fix = [](const SO3& R) { return SO3::from_matrix_normalized(R.matrix()); };
  SymmetryElement out = *this;
  out.D = SE23(fix(D.rotation()), D.velocity(), D.position());
  out.F = SE3(fix(F.rotation()), F.translation());
  for (SE3& c : out.clone_factors) c = SE3(fix(c.rotation()), c.translation());
  return out;
}

SymmetryElement SymmetryElement::inverse() const {
  SymmetryElement out;
  out.D = D.inverse();
  out.delta = -(out.D.adjoint() * delta);
  out.F = F.inverse();
  out.clone_factors.reserve(clone_factors.size());
  for (const SE3& Fi : clone_factors) out.clone_factors.push_back(Fi.inverse());
  return out;
}

SystemInput SystemInput::from_imu(const Vector3d& gyro, const Vector3d& acc) {
  SystemInput u;
  u.w.head<3>() = gyro;
  u.w.segment<3>(3) = acc;
  return u;
}

Eigen::Matrix<double, 25, 1> SystemInput::stacked() const {
  Eigen::Matrix<double, 25, 1> v;
  v << w, tau, mu;
  return v;
}

SystemInput SystemInput::from_stacked(const Eigen::Matrix<double, 25, 1>& v) {
  SystemInput u;
  u.w = v.head<10>();
  u.tau = v.segment<9>(10);
  u.mu = v.tail<6>();
  return u;
}

Vector10d gravity_input(const Vector3d& gravity) {
  Vector10d g = Vector10d::Zero();
  g.segment<3>(3) = -gravity;
  g(9) = 1.0;
  return g;
}

SystemState state_action(const SymmetryElement& X, const SystemState& xi) {
  require_same_count(X.clone_factors.size(), xi.clones.size(), "state_action");
  const SE23 Dinv = X.D.inverse();
  SystemState out;
  out.T = xi.T * X.D;
  out.b = Dinv.adjoint() * (xi.b - X.delta);
  out.L = project_to_se3(Dinv) * xi.L * X.F;
  out.clones.reserve(xi.clones.size());
  for (std::size_t i = 0; i < xi.clones.size(); ++i) {
    out.clones.push_back({xi.clones[i].pose * X.clone_factors[i], xi.clones[i].stamp});
  }
  return out;
}

SymmetryElement state_action_inverse(const SystemState& origin, const SystemState& xi) {
  require_same_count(origin.clones.size(), xi.clones.size(), "state_action_inverse");
  SymmetryElement X;
  X.D = origin.T.inverse() * xi.T;
  X.delta = origin.b - X.D.adjoint() * xi.b;
  X.F = origin.L.inverse() * project_to_se3(X.D) * xi.L;
  X.clone_factors.reserve(xi.clones.size());
  for (std::size_t i = 0; i < xi.clones.size(); ++i) {
    X.clone_factors.push_back(origin.clones[i].pose.inverse() * xi.clones[i].pose);
  }
  return X;
}

SystemInput input_action(const SymmetryElement& X, const SystemInput& u) {
  const SE23 Dinv = X.D.inverse();
  SystemInput out;
  out.w = project_to_gal3(Dinv).adjoint() * (u.w - embed(X.delta));
  out.tau = Dinv.adjoint() * u.tau;
  out.mu = X.F.inverse().adjoint() * u.mu;
  return out;
}

SystemState discrete_dynamics(const SystemState& xi, const SystemInput& u, double dt, const Vector3d& gravity) {
  const Gal3 T = Gal3::exp(-gravity_input(gravity) * dt) * project_to_gal3(xi.T) * Gal3::exp((u.w - embed(xi.b)) * dt);
  SystemState out;
  out.T = project_to_se23(T);
  out.b = xi.b + u.tau * dt;
  out.L = xi.L * SE3::exp(u.mu * dt);
  out.clones = xi.clones;
  return out;
}

SymmetryElement lift(const SystemState& xi, const SystemInput& u, double dt, const Vector3d& gravity) {
  const Gal3 Tinv = project_to_gal3(xi.T.inverse());
  SymmetryElement L;
  L.D = project_to_se23(Gal3::exp(-(Tinv.adjoint() * gravity_input(gravity)) * dt) *
                        Gal3::exp((u.w - embed(xi.b)) * dt));
  L.delta = xi.b - L.D.adjoint() * (xi.b + u.tau * dt);
  L.F = xi.L.inverse() * project_to_se3(L.D) * xi.L * SE3::exp(u.mu * dt);
  L.clone_factors.assign(xi.clones.size(), SE3());
  return L;
}

SymmetryElement lifted_step(const SymmetryElement& X, const SystemState& origin, const SystemInput& u, double dt,
                            const Vector3d& gravity) {
  return (X * lift(state_action(X, origin), u, dt, gravity)).normalized();
}

VectorXd error_log(const SymmetryElement& E) {
  const int k = E.clone_count();
  VectorXd eps(error_dimension(k));
  eps.head<18>() = TangentGroup(E.D, E.delta).log();
  eps.segment<6>(kIdxF) = E.F.log();
  for (int i = 0; i < k; ++i) eps.segment<6>(clone_offset(i)) = E.clone_factors[i].log();
  return eps;
}

VectorXd error_coordinates(const SymmetryElement& X_hat, const SystemState& xi, const SystemState& origin) {
  const SystemState e = state_action(X_hat.inverse(), xi);
  return error_log(state_action_inverse(origin, e));
}

SymmetryElement error_inverse(const VectorXd& eps) {
  if (eps.size() < kCoreDim || (eps.size() - kCoreDim) % kCloneDim != 0) {
    throw std::invalid_argument("error vector must have 24 + 6k entries, got " + std::to_string(eps.size()));
  }
  const int k = static_cast<int>((eps.size() - kCoreDim) / kCloneDim);
  const TangentGroup Dd = TangentGroup::exp(eps.head<18>());
  SymmetryElement X;
  X.D = Dd.base();
  X.delta = Dd.fiber();
  X.F = SE3::exp(eps.segment<6>(kIdxF));
  X.clone_factors.reserve(k);
  for (int i = 0; i < k; ++i) X.clone_factors.push_back(SE3::exp(eps.segment<6>(clone_offset(i))));
  return X;
}

}  // namespace eqf_rio
