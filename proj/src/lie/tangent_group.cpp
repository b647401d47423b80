#include "eqf_rio/lie/tangent_group.hpp"

#include <Eigen/LU>
#include <iostream>

namespace eqf_rio {

TangentGroup TangentGroup::exp(const Vector18d& u) {
  const Vector9d uD = u.head<9>();
  return TangentGroup(SE23::exp(uD), SE23::left_jacobian(uD) * u.tail<9>());
}

Vector18d TangentGroup::log() const {
  const Vector9d uD = D_.log();
  const Eigen::PartialPivLU<Matrix9d> lu(SE23::left_jacobian(uD));
  if (lu.rcond() < 1e-12) {
    std::cerr << "TangentGroup::log: ill-conditioned left Jacobian (rcond " << lu.rcond() << ")\n";
  }
  Vector18d u;
  u << uD, lu.solve(delta_);
  return u;
}

TangentGroup TangentGroup::inverse() const {
  const SE23 Dinv = D_.inverse();
  return TangentGroup(Dinv, -(Dinv.adjoint() * delta_));
}

TangentGroup TangentGroup::operator*(const TangentGroup& other) const {
  return TangentGroup(D_ * other.D_, delta_ + D_.adjoint() * other.delta_);
}

}  // namespace eqf_rio
