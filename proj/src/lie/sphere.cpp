#include "eqf_rio/lie/sphere.hpp"

#include <cmath>

#include "eqf_rio/lie/so3.hpp"

namespace eqf_rio {

SphericalPoint sphere_decompose(const Vector3d& x) {
  const double n = x.norm();
  if (!(n > kMinRange)) throw std::invalid_argument("degenerate point");
  return {n, x / n};
}

Vector3d sphere_compose(const SphericalPoint& sp) { return sp.kappa * sp.rho; }

Matrix32d sphere_basis(const Vector3d& rho) {
  const Vector3d axis = Vector3d::UnitZ().cross(rho);
  const double s = axis.norm();
  const double angle = std::atan2(s, rho.z());
  Matrix3d R;
  if (s > 1e-12) {
    R = SO3::exp(axis / s * angle).matrix();
  } else if (rho.z() > 0.0) {
    R.setIdentity();
  } else {
    R = SO3::exp(Vector3d::UnitX() * M_PI).matrix();
  }
  return R.leftCols<2>();
}

Matrix3d sphere_jacobian(const Vector3d& p) {
  const SphericalPoint sp = sphere_decompose(p);
  Matrix3d J;
  J.col(0) = sp.rho;
  J.rightCols<2>() = -sp.kappa * skew(sp.rho) * sphere_basis(sp.rho);
  return J;
}

SphericalPoint sphere_boxplus(const SphericalPoint& sp, const Vector3d& eta) {
  const double kappa = sp.kappa + eta.x();
  if (!(kappa > 0.0)) throw std::domain_error("negative range");
  const Vector3d w = sphere_basis(sp.rho) * eta.tail<2>();
  Vector3d rho = SO3::exp(w) * sp.rho;
  return {kappa, rho};
}

Vector3d apply_spherical_noise(const Vector3d& p, const Vector3d& eta) {
  return sphere_compose(sphere_boxplus(sphere_decompose(p), eta));
}

}  // namespace eqf_rio
