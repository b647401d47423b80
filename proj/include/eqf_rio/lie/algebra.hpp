#pragma once

#include "eqf_rio/lie/gal3.hpp"

namespace eqf_rio {

enum class GroupTag { SO3, SE3, SE23, Gal3 };

int algebra_dimension(GroupTag tag);
int matrix_dimension(GroupTag tag);
const char* to_string(GroupTag tag);

/// Algebra coordinates tagged with the group they belong to.
class AlgebraVector {
 public:
  /// Throws std::invalid_argument if the coordinate count does not match.
  AlgebraVector(GroupTag tag, VectorXd coordinates);

  GroupTag tag() const { return tag_; }
  const VectorXd& coordinates() const { return coords_; }

 private:
  GroupTag tag_;
  VectorXd coords_;
};

// Tag-dispatched operations on the matrix embedding of each group. Elements
// are passed as their square matrix representation.

MatrixXd wedge(GroupTag tag, const VectorXd& coordinates);
inline MatrixXd wedge(const AlgebraVector& u) { return wedge(u.tag(), u.coordinates()); }
VectorXd vee(GroupTag tag, const MatrixXd& matrix);

MatrixXd group_exp(const AlgebraVector& u);
AlgebraVector group_log(GroupTag tag, const MatrixXd& element);
MatrixXd adjoint_matrix(GroupTag tag, const MatrixXd& element);
MatrixXd little_adjoint(const AlgebraVector& u);
MatrixXd left_jacobian(const AlgebraVector& u);

// Projections between the nested structures SE(3) ⊂ SE2(3) ⊂ G(3).
// Restricting drops components; extending fills in identity/zero.

inline SE23 project_to_se23(const Gal3& X) { return {X.rotation(), X.velocity(), X.position()}; }
inline SE3 project_to_se3(const Gal3& X) { return {X.rotation(), X.position()}; }
inline SE3 project_to_se3(const SE23& X) { return {X.rotation(), X.position()}; }
inline Gal3 project_to_gal3(const SE23& X) { return {X.rotation(), X.velocity(), X.position(), 0.0}; }
inline SE23 project_to_se23(const SE3& X) { return {X.rotation(), Vector3d::Zero(), X.translation()}; }

inline Vector9d project_to_se23(const Vector10d& u) { return u.head<9>(); }
inline Vector10d project_to_gal3(const Vector9d& v) {
  Vector10d u;
  u << v, 0.0;
  return u;
}
inline Vector6d project_se23_to_se3(const Vector9d& v) {
  Vector6d u;
  u << v.head<3>(), v.tail<3>();
  return u;
}

/// Dynamic projections; throw std::invalid_argument for unsupported pairs.
MatrixXd project_group(GroupTag from, GroupTag to, const MatrixXd& element);
VectorXd project_algebra(GroupTag from, GroupTag to, const VectorXd& coordinates);

/// Xi: keeps row blocks 1 and 3 of a 9xN matrix (rotation and position rows).
MatrixXd map_xi(const MatrixXd& M);
/// Theta: top-left 9x9 block of a 10x10 matrix.
Matrix9d map_theta(const MatrixXd& M);
/// Omega: top 9 rows of a 10x10 matrix.
Matrix9x10d map_omega(const MatrixXd& M);

}  // namespace eqf_rio
