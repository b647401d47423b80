#pragma once

#include "eqf_rio/lie/types.hpp"

#include <Eigen/Core>

namespace eqf_rio {

using Matrix32d = Eigen::Matrix<double, 3, 2>;

/// Minimum range accepted by the spherical-coordinate operators (m).
inline constexpr double kMinRange = 1e-6;

/// Range/bearing representation (kappa, rho) of a 3D point.
struct SphericalPoint {
  double kappa = 1.0;
  Vector3d rho = Vector3d::UnitX();
};

/// Throws std::invalid_argument ("degenerate point") if |x| <= kMinRange.
SphericalPoint sphere_decompose(const Vector3d& x);
Vector3d sphere_compose(const SphericalPoint& sp);

/// Orthonormal tangent frame at rho obtained by rotating [e1 e2] along the
/// geodesic that carries e3 onto rho.
Matrix32d sphere_basis(const Vector3d& rho);

/// [rho, -kappa rho^ N_rho].
Matrix3d sphere_jacobian(const Vector3d& p);

/// (kappa + eta_0, exp((N_rho eta_12)^) rho). Throws std::domain_error
/// ("negative range") if the perturbed range is not positive.
SphericalPoint sphere_boxplus(const SphericalPoint& sp, const Vector3d& eta);

/// Perturbs a Cartesian point with noise expressed in spherical coordinates.
Vector3d apply_spherical_noise(const Vector3d& p, const Vector3d& eta);

}  // namespace eqf_rio
