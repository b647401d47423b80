#include <gtest/gtest.h>

#include "eqf_rio/core/symmetry.hpp"
#include "eqf_rio/lie/left_jacobian.hpp"
#include "test_support.hpp"

using namespace eqf_rio;
using eqf_rio::testing::element_distance;
using eqf_rio::testing::Rng;
using eqf_rio::testing::state_distance;

namespace {

const int kCloneCounts[] = {0, 1, 3};
const double kSteps[] = {1e-4, 1e-2, 0.1};

struct Derivative {
  Matrix3d R;
  Vector3d v, p;
};

// Continuous strapdown model with constant input.
Derivative continuous(const Matrix3d& R, const Vector3d& v, const SystemState& xi, const SystemInput& u,
                      const Vector3d& g) {
  const Vector3d w = u.w.head<3>() - xi.b.head<3>();
  const Vector3d a = u.w.segment<3>(3) - xi.b.segment<3>(3);
  const Vector3d nu = u.w.segment<3>(6) - xi.b.segment<3>(6);
  return {R * skew(w), R * a + g, v + R * nu};
}

SE23 rk4(const SystemState& xi, const SystemInput& u, double dt, int steps, const Vector3d& g) {
  Matrix3d R = xi.T.rotation().matrix();
  Vector3d v = xi.T.velocity(), p = xi.T.position();
  const double h = dt / steps;
  for (int i = 0; i < steps; ++i) {
    const Derivative k1 = continuous(R, v, xi, u, g);
    const Derivative k2 = continuous(R + 0.5 * h * k1.R, v + 0.5 * h * k1.v, xi, u, g);
    const Derivative k3 = continuous(R + 0.5 * h * k2.R, v + 0.5 * h * k2.v, xi, u, g);
    const Derivative k4 = continuous(R + h * k3.R, v + h * k3.v, xi, u, g);
    R += h / 6.0 * (k1.R + 2 * k2.R + 2 * k3.R + k4.R);
    v += h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    p += h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
  }
  return SE23(SO3::from_matrix_normalized(R), v, p);
}

}  // namespace

TEST(StateAction, IdentityAndRightAction) {
  Rng rng(1);
  for (int k : kCloneCounts) {
    for (int i = 0; i < 500; ++i) {
      const SystemState xi = rng.state(k);
      const SymmetryElement X = rng.element(k), Y = rng.element(k);
      EXPECT_LT(state_distance(state_action(SymmetryElement::identity(k), xi), xi), 1e-14);
      EXPECT_LT(state_distance(state_action(X * Y, xi), state_action(Y, state_action(X, xi))), 1e-10);
      EXPECT_LT(state_distance(state_action(X.inverse(), state_action(X, xi)), xi), 1e-10);
    }
  }
}

TEST(StateAction, CloneCountMismatchThrows) {
  Rng rng(2);
  EXPECT_THROW(state_action(rng.element(1), rng.state(2)), std::invalid_argument);
  EXPECT_THROW(state_action_inverse(rng.state(0), rng.state(1)), std::invalid_argument);
  EXPECT_THROW(rng.element(1) * rng.element(2), std::invalid_argument);
}

TEST(StateActionInverse, PartialInverse) {
  Rng rng(3);
  for (int k : kCloneCounts) {
    for (int i = 0; i < 500; ++i) {
      const SystemState origin = rng.state(k), xi = rng.state(k);
      const SymmetryElement X = state_action_inverse(origin, xi);
      EXPECT_LT(state_distance(state_action(X, origin), xi), 1e-10);
      EXPECT_LT(element_distance(state_action_inverse(xi, xi), SymmetryElement::identity(k)), 1e-12);
    }
  }
}

TEST(StateActionInverse, IdentityOriginGivesTDirectly) {
  Rng rng(4);
  const SystemState xi = rng.state(2);
  const SymmetryElement X = state_action_inverse(SystemState::identity(2), xi);
  EXPECT_LT((X.D.matrix() - xi.T.matrix()).norm(), 1e-15);
}

TEST(InputAction, ActionPropertiesAndUnitSlot) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const SystemInput u = rng.input();
    const SymmetryElement X = rng.element(0), Y = rng.element(0);
    const SystemInput id = input_action(SymmetryElement::identity(), u);
    EXPECT_LT((id.stacked() - u.stacked()).norm(), 1e-14);
    const SystemInput lhs = input_action(X * Y, u);
    const SystemInput rhs = input_action(Y, input_action(X, u));
    EXPECT_LT((lhs.stacked() - rhs.stacked()).norm(), 1e-9 * std::max(1.0, lhs.stacked().norm()));
    EXPECT_EQ(input_action(X, u).w(9), 1.0);
  }
}

TEST(Dynamics, FreeDriftWithoutGravity) {
  SystemState xi;
  xi.T = SE23(SO3::rot_z(0.4), Vector3d(1.0, -2.0, 0.5), Vector3d(3.0, 1.0, 2.0));
  const SystemState next = discrete_dynamics(xi, SystemInput(), 0.1, Vector3d::Zero());
  EXPECT_LT((next.T.rotation().matrix() - xi.T.rotation().matrix()).norm(), 1e-15);
  EXPECT_LT((next.T.velocity() - xi.T.velocity()).norm(), 1e-15);
  EXPECT_LT((next.T.position() - (xi.T.position() + 0.1 * xi.T.velocity())).norm(), 1e-14);
}

TEST(Dynamics, FallingBodyHandValues) {
  SystemState xi;
  xi.T = SE23(SO3(), Vector3d(1, 0, 0), Vector3d::Zero());
  const SystemState next = discrete_dynamics(xi, SystemInput(), 0.1, Vector3d(0, 0, -9.81));
  EXPECT_LT((next.T.velocity() - Vector3d(1, 0, -0.981)).norm(), 1e-14);
  EXPECT_LT((next.T.position() - Vector3d(0.1, 0, -0.04905)).norm(), 1e-14);
}

TEST(Dynamics, BiasAndCalibrationEvolution) {
  Rng rng(6);
  const SystemState xi = rng.state(2);
  const SystemInput u = rng.input();
  const SystemState next = discrete_dynamics(xi, u, 0.05);
  EXPECT_LT((next.b - (xi.b + u.tau * 0.05)).norm(), 1e-15);
  EXPECT_LT((next.L.matrix() - (xi.L * SE3::exp(u.mu * 0.05)).matrix()).norm(), 1e-14);
  EXPECT_EQ(next.clones[1].pose.matrix(), xi.clones[1].pose.matrix());
}

TEST(Dynamics, MatchesFineRungeKutta) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const SystemState xi = rng.state(0);
    SystemInput u = rng.input();
    const SE23 exact = discrete_dynamics(xi, u, 0.1).T;
    const SE23 oracle = rk4(xi, u, 0.1, 2000, kGravity);
    EXPECT_LT((exact.matrix() - oracle.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Dynamics, SingleRungeKuttaStepDefectShrinks) {
  Rng rng(8);
  const SystemState xi = rng.state(0);
  const SystemInput u = rng.input();
  double previous = 0.0;
  for (double dt : {0.08, 0.04, 0.02}) {
    const double defect = (discrete_dynamics(xi, u, dt).T.matrix() - rk4(xi, u, dt, 1, kGravity).matrix()).norm();
    if (previous > 0.0) EXPECT_GT(previous / defect, 4.0);
    previous = defect;
  }
}

TEST(Lift, ZeroStepIsIdentity) {
  Rng rng(9);
  const SymmetryElement L = lift(rng.state(2), rng.input(), 0.0);
  EXPECT_LT(element_distance(L, SymmetryElement::identity(2)), 1e-15);
}

TEST(Lift, LiftCondition) {
  Rng rng(10);
  for (int k : kCloneCounts) {
    for (double dt : kSteps) {
      for (int i = 0; i < 500; ++i) {
        const SystemState xi = rng.state(k);
        const SystemInput u = rng.input();
        EXPECT_LT(state_distance(state_action(lift(xi, u, dt), xi), discrete_dynamics(xi, u, dt)), 1e-9);
      }
    }
  }
}

TEST(Lift, Equivariance) {
  Rng rng(11);
  for (int k : kCloneCounts) {
    for (double dt : kSteps) {
      for (int i = 0; i < 500; ++i) {
        const SystemState xi = rng.state(k);
        const SystemInput u = rng.input();
        const SymmetryElement X = rng.element(k);
        const SystemState lhs = discrete_dynamics(state_action(X, xi), input_action(X, u), dt);
        const SystemState rhs = state_action(X, discrete_dynamics(xi, u, dt));
        EXPECT_LT(state_distance(lhs, rhs), 1e-9);
      }
    }
  }
}

TEST(LiftedStep, ConsistentWithDynamics) {
  Rng rng(12);
  for (int k : kCloneCounts) {
    const SystemState origin = SystemState::identity(k);
    for (int i = 0; i < 200; ++i) {
      const SymmetryElement X = rng.element(k);
      const SystemInput u = rng.input();
      const SymmetryElement next = lifted_step(X, origin, u, 0.01);
      const SystemState expected = discrete_dynamics(state_action(X, origin), u, 0.01);
      EXPECT_LT(state_distance(state_action(next, origin), expected), 1e-9);
    }
  }
}

TEST(LiftedStep, FromIdentityEqualsLift) {
  Rng rng(13);
  const SystemState origin = SystemState::identity(1);
  const SystemInput u = rng.input();
  const SymmetryElement a = lifted_step(SymmetryElement::identity(1), origin, u, 0.02);
  EXPECT_LT(element_distance(a, lift(origin, u, 0.02)), 1e-12);
}

TEST(LiftedStep, HalfStepsMatchFullStepForConstantInput) {
  Rng rng(14);
  const SystemState origin = SystemState::identity(0);
  const SymmetryElement X = rng.element(0);
  SystemInput u = rng.input();
  u.tau.setZero();
  const SymmetryElement full = lifted_step(X, origin, u, 0.1);
  const SymmetryElement half = lifted_step(lifted_step(X, origin, u, 0.05), origin, u, 0.05);
  EXPECT_LT(state_distance(state_action(full, origin), state_action(half, origin)), 1e-9);
}

TEST(ErrorCoordinates, ZeroAtEstimate) {
  Rng rng(15);
  for (int k : kCloneCounts) {
    const SystemState origin = SystemState::identity(k);
    const SymmetryElement X = rng.element(k);
    EXPECT_LT(error_coordinates(X, state_action(X, origin), origin).norm(), 1e-10);
    EXPECT_EQ(error_coordinates(X, state_action(X, origin), origin).size(), error_dimension(k));
  }
}

TEST(ErrorCoordinates, RoundTripWithErrorInverse) {
  Rng rng(16);
  for (int k : kCloneCounts) {
    const SystemState origin = SystemState::identity(k);
    for (int i = 0; i < 500; ++i) {
      const SymmetryElement X = rng.element(k);
      const VectorXd eta = rng.vec(error_dimension(k), 0.3);
      const SystemState xi = state_action(error_inverse(eta) * X, origin);
      EXPECT_LT((error_coordinates(X, xi, origin) - eta).norm(), 1e-9);
    }
  }
}

TEST(ErrorCoordinates, FirstOrderChart) {
  Rng rng(17);
  const SystemState origin = SystemState::identity(1);
  const SymmetryElement X = rng.element(1);
  const VectorXd eta = rng.vec(error_dimension(1), 1.0).normalized() * 1e-4;
  const VectorXd eps = error_coordinates(X, state_action(error_inverse(eta) * X, origin), origin);
  EXPECT_LT((eps - eta).norm() / eta.norm(), 1e-3);
}

TEST(ErrorInverse, StructureAndErrors) {
  EXPECT_LT(element_distance(error_inverse(VectorXd::Zero(30)), SymmetryElement::identity(1)), 1e-15);
  VectorXd eps = VectorXd::Zero(24);
  eps.segment<9>(kIdxDelta) << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const SymmetryElement X = error_inverse(eps);
  EXPECT_EQ(X.D.matrix(), Matrix5d::Identity());
  EXPECT_EQ(X.delta, eps.segment<9>(kIdxDelta));
  EXPECT_THROW(error_inverse(VectorXd::Zero(25)), std::invalid_argument);

  Rng rng(18);
  const VectorXd e = rng.vec(24, 0.5);
  const SymmetryElement Y = error_inverse(e);
  EXPECT_LT((Y.delta - SE23::left_jacobian(e.head<9>()) * e.segment<9>(kIdxDelta)).norm(), 1e-12);
}

TEST(Transitivity, SpotCheck) {
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const SystemState a = rng.state(3), b = rng.state(3);
    EXPECT_LT(state_distance(state_action(state_action_inverse(a, b), a), b), 1e-10);
  }
}
