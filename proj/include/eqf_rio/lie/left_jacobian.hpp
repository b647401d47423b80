#pragma once

#include <cmath>

namespace eqf_rio {

/// Left Jacobian J_l(u) = sum_k ad(u)^k / (k+1)! of any of the matrix groups.
///
/// The series is truncated once a term drops below 1e-14 (at most 30
/// terms). Arguments with ||ad(u)|| > 1 are first halved until the series
/// converges quickly, then rebuilt with J(2u) = (I + Ad(exp u)) J(u) / 2,
/// which follows from J(u) = int_0^1 Ad(exp(s u)) ds.
template <class Group>
typename Group::Jacobian left_jacobian_series(const typename Group::Tangent& u) {
  using Jacobian = typename Group::Jacobian;
  constexpr int kMaxTerms = 30;
  constexpr double kCutoff = 1e-14;

  const Jacobian ad_u = Group::ad(u);
  int halvings = 0;
  double scale = 1.0;
  const double norm = ad_u.norm();
  while (norm * scale > 1.0 && halvings < 64) {
    scale *= 0.5;
    ++halvings;
  }

  const Jacobian a = ad_u * scale;
  Jacobian result = Jacobian::Identity();
  Jacobian term = Jacobian::Identity();
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = (term * a) / static_cast<double>(k + 1);
    result += term;
    if (term.norm() < kCutoff) break;
  }

  typename Group::Tangent w = u * scale;
  for (int h = 0; h < halvings; ++h) {
    result = 0.5 * (Jacobian::Identity() + Group::exp(w).adjoint()) * result;
    w *= 2.0;
  }
  return result;
}

}  // namespace eqf_rio
