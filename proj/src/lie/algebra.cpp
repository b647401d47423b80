#include "eqf_rio/lie/algebra.hpp"

#include <string>

namespace eqf_rio {

namespace {

void require_dimension(const VectorXd& v, GroupTag tag) {
  if (v.size() != algebra_dimension(tag)) {
    throw std::invalid_argument(std::string("algebra coordinates for ") + to_string(tag) + " must have " +
                                std::to_string(algebra_dimension(tag)) + " entries, got " +
                                std::to_string(v.size()));
  }
}

void require_square(const MatrixXd& M, GroupTag tag) {
  const int n = matrix_dimension(tag);
  if (M.rows() != n || M.cols() != n) {
    throw std::invalid_argument(std::string("matrix for ") + to_string(tag) + " must be " +
                                std::to_string(n) + "x" + std::to_string(n));
  }
}

}  // namespace

int algebra_dimension(GroupTag tag) {
  switch (tag) {
    case GroupTag::SO3: return 3;
    case GroupTag::SE3: return 6;
    case GroupTag::SE23: return 9;
    case GroupTag::Gal3: return 10;
  }
  return 0;
}

int matrix_dimension(GroupTag tag) {
  switch (tag) {
    case GroupTag::SO3: return 3;
    case GroupTag::SE3: return 4;
    case GroupTag::SE23:
    case GroupTag::Gal3: return 5;
  }
  return 0;
}

const char* to_string(GroupTag tag) {
  switch (tag) {
    case GroupTag::SO3: return "so3";
    case GroupTag::SE3: return "se3";
    case GroupTag::SE23: return "se23";
    case GroupTag::Gal3: return "gal3";
  }
  return "?";
}

AlgebraVector::AlgebraVector(GroupTag tag, VectorXd coordinates) : tag_(tag), coords_(std::move(coordinates)) {
  require_dimension(coords_, tag_);
}

MatrixXd wedge(GroupTag tag, const VectorXd& v) {
  require_dimension(v, tag);
  switch (tag) {
    case GroupTag::SO3: return SO3::wedge(v);
    case GroupTag::SE3: return SE3::wedge(v);
    case GroupTag::SE23: return SE23::wedge(v);
    case GroupTag::Gal3: return Gal3::wedge(v);
  }
  return {};
}

VectorXd vee(GroupTag tag, const MatrixXd& M) {
  require_square(M, tag);
  switch (tag) {
    case GroupTag::SO3: return SO3::vee(M);
    case GroupTag::SE3: return SE3::vee(M);
    case GroupTag::SE23: return SE23::vee(M);
    case GroupTag::Gal3: return Gal3::vee(M);
  }
  return {};
}

MatrixXd group_exp(const AlgebraVector& u) {
  const VectorXd& v = u.coordinates();
  switch (u.tag()) {
    case GroupTag::SO3: return SO3::exp(v).matrix();
    case GroupTag::SE3: return SE3::exp(v).matrix();
    case GroupTag::SE23: return SE23::exp(v).matrix();
    case GroupTag::Gal3: return Gal3::exp(v).matrix();
  }
  return {};
}

AlgebraVector group_log(GroupTag tag, const MatrixXd& M) {
  require_square(M, tag);
  switch (tag) {
    case GroupTag::SO3: return {tag, SO3::from_matrix(M).log()};
    case GroupTag::SE3: return {tag, SE3::from_matrix(M).log()};
    case GroupTag::SE23: return {tag, SE23::from_matrix(M).log()};
    case GroupTag::Gal3: return {tag, Gal3::from_matrix(M).log()};
  }
  throw std::invalid_argument("group_log: unknown tag");
}

MatrixXd adjoint_matrix(GroupTag tag, const MatrixXd& M) {
  require_square(M, tag);
  switch (tag) {
    case GroupTag::SO3: return SO3::from_matrix(M).adjoint();
    case GroupTag::SE3: return SE3::from_matrix(M).adjoint();
    case GroupTag::SE23: return SE23::from_matrix(M).adjoint();
    case GroupTag::Gal3: return Gal3::from_matrix(M).adjoint();
  }
  return {};
}

MatrixXd little_adjoint(const AlgebraVector& u) {
  const VectorXd& v = u.coordinates();
  switch (u.tag()) {
    case GroupTag::SO3: return SO3::ad(v);
    case GroupTag::SE3: return SE3::ad(v);
    case GroupTag::SE23: return SE23::ad(v);
    case GroupTag::Gal3: return Gal3::ad(v);
  }
  return {};
}

MatrixXd left_jacobian(const AlgebraVector& u) {
  const VectorXd& v = u.coordinates();
  switch (u.tag()) {
    case GroupTag::SO3: return SO3::left_jacobian(v);
    case GroupTag::SE3: return SE3::left_jacobian(v);
    case GroupTag::SE23: return SE23::left_jacobian(v);
    case GroupTag::Gal3: return Gal3::left_jacobian(v);
  }
  return {};
}

MatrixXd project_group(GroupTag from, GroupTag to, const MatrixXd& M) {
  require_square(M, from);
  if (from == GroupTag::Gal3 && to == GroupTag::SE23) return project_to_se23(Gal3::from_matrix(M)).matrix();
  if (from == GroupTag::Gal3 && to == GroupTag::SE3) return project_to_se3(Gal3::from_matrix(M)).matrix();
  if (from == GroupTag::SE23 && to == GroupTag::SE3) return project_to_se3(SE23::from_matrix(M)).matrix();
  if (from == GroupTag::SE23 && to == GroupTag::Gal3) return project_to_gal3(SE23::from_matrix(M)).matrix();
  if (from == GroupTag::SE3 && to == GroupTag::SE23) return project_to_se23(SE3::from_matrix(M)).matrix();
  if (from == GroupTag::SE3 && to == GroupTag::Gal3) {
    return project_to_gal3(project_to_se23(SE3::from_matrix(M))).matrix();
  }
  throw std::invalid_argument(std::string("unsupported group projection ") + to_string(from) + " -> " +
                              to_string(to));
}

VectorXd project_algebra(GroupTag from, GroupTag to, const VectorXd& v) {
  require_dimension(v, from);
  if (from == GroupTag::SE23 && to == GroupTag::Gal3) return project_to_gal3(Vector9d(v));
  if (from == GroupTag::Gal3 && to == GroupTag::SE23) return project_to_se23(Vector10d(v));
  if (from == GroupTag::SE23 && to == GroupTag::SE3) return project_se23_to_se3(Vector9d(v));
  if (from == GroupTag::Gal3 && to == GroupTag::SE3) return project_se23_to_se3(Vector10d(v).head<9>());
  if (from == GroupTag::SE3 && to == GroupTag::SE23) {
    Vector9d out = Vector9d::Zero();
    out.head<3>() = v.head<3>();
    out.tail<3>() = v.tail<3>();
    return out;
  }
  throw std::invalid_argument(std::string("unsupported algebra projection ") + to_string(from) + " -> " +
                              to_string(to));
}

MatrixXd map_xi(const MatrixXd& M) {
  if (M.rows() != 9) throw std::invalid_argument("map_xi: input must have 9 rows");
  MatrixXd out(6, M.cols());
  out.topRows(3) = M.topRows(3);
  out.bottomRows(3) = M.bottomRows(3);
  return out;
}

Matrix9d map_theta(const MatrixXd& M) {
  if (M.rows() != 10 || M.cols() != 10) throw std::invalid_argument("map_theta: input must be 10x10");
  return M.topLeftCorner<9, 9>();
}

Matrix9x10d map_omega(const MatrixXd& M) {
  if (M.rows() != 10 || M.cols() != 10) throw std::invalid_argument("map_omega: input must be 10x10");
  return M.topRows<9>();
}

}  // namespace eqf_rio
