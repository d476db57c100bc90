#include "kat/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace kat;

namespace {

State random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  State s;
  s.p = Vec3(n(rng), n(rng), n(rng));
  s.R = random_quaternion(rng).toRotationMatrix();
  s.v = 3.0 * Vec3(n(rng), n(rng), n(rng));
  s.omega = 2.0 * Vec3(n(rng), n(rng), n(rng));
  return s;
}

Wrench random_wrench(std::mt19937_64& rng, const QuadParams& qp) {
  std::uniform_real_distribution<double> u(0.0, qp.f_rotor_max);
  RotorThrusts t;
  for (auto& f : t.f) f = u(rng);
  return mix(t, qp);
}

double max_abs_diff(const State& a, const State& b) {
  double d = (a.p - b.p).cwiseAbs().maxCoeff();
  d = std::max(d, (a.R - b.R).cwiseAbs().maxCoeff());
  d = std::max(d, (a.v - b.v).cwiseAbs().maxCoeff());
  return std::max(d, (a.omega - b.omega).cwiseAbs().maxCoeff());
}

Wrench hover(const QuadParams& qp) { return Wrench{qp.hover_thrust(), Vec3::Zero()}; }

}  // namespace

TEST(Derivative, HoverIsFixedPoint) {
  const QuadParams qp;
  const StateDerivative d = derivative(State{}, hover(qp), qp);
  EXPECT_LT(d.p_dot.norm(), 1e-12);
  EXPECT_LT(d.v_dot.norm(), 1e-12);
  EXPECT_LT(d.R_dot.norm(), 1e-12);
  EXPECT_LT(d.omega_dot.norm(), 1e-12);
}

TEST(Derivative, ZeroThrustIsFreeFall) {
  const QuadParams qp;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    State s = random_state(rng);
    const StateDerivative d = derivative(s, Wrench{0.0, Vec3::Zero()}, qp);
    EXPECT_LT((d.v_dot - qp.g * kGravityDir).norm(), 1e-12);
  }
}

TEST(Derivative, DecoupledEulerEquation) {
  QuadParams qp;
  qp.J = Vec3(0.02, 0.03, 0.04).asDiagonal();
  const StateDerivative d = derivative(State{}, Wrench{qp.hover_thrust(), Vec3(0.1, 0, 0)}, qp);
  EXPECT_NEAR(d.omega_dot.x(), 0.1 / 0.02, 1e-12);
  EXPECT_NEAR(d.omega_dot.y(), 0.0, 1e-15);
  EXPECT_NEAR(d.omega_dot.z(), 0.0, 1e-15);
}

TEST(StepForward, HoverUnchanged) {
  const QuadParams qp;
  State s;
  s.p = Vec3(1, 2, 3);
  const State n = step_forward(s, hover(qp), 1e-3, qp);
  EXPECT_LT(max_abs_diff(s, n), 1e-12);
}

TEST(StepForward, OrthonormalityUnderPerturbedHover) {
  const QuadParams qp;
  State s;
  Wrench w = hover(qp);
  w.M = Vec3(1e-4, -2e-4, 5e-5);
  for (int i = 0; i < 1000; ++i) s = step_forward(s, w, 1e-3, qp);
  EXPECT_NEAR(s.R.determinant(), 1.0, 1e-9);
}

TEST(StepForward, FreeFallMatchesClosedForm) {
  const QuadParams qp;
  State s;
  const Wrench off{0.0, Vec3::Zero()};
  for (int i = 0; i < 1000; ++i) s = step_forward(s, off, 1e-3, qp);
  EXPECT_LT((s.v - qp.g * kGravityDir).norm(), 1e-6);
  // explicit Euler position lags the continuous solution by g dt t / 2
  const Vec3 expected = kGravityDir * qp.g * (0.5 * 1.0 - 0.5 * 1e-3);
  EXPECT_LT((s.p - expected).norm(), 1e-9);
}

TEST(StepForward, FirstOrderConsistentWithDerivative) {
  const QuadParams qp;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const State s = random_state(rng);
    const Wrench w = random_wrench(rng, qp);
    const StateDerivative d = derivative(s, w, qp);
    auto err = [&](double h) {
      const State n = step_forward(s, w, h, qp);
      double e = ((n.p - s.p) / h - d.p_dot).norm();
      e = std::max(e, ((n.v - s.v) / h - d.v_dot).norm());
      e = std::max(e, ((n.omega - s.omega) / h - d.omega_dot).norm());
      e = std::max(e, ((n.R - s.R) / h - d.R_dot).norm());
      return e;
    };
    const double e3 = err(1e-3);
    const double e4 = err(1e-4);
    // Euler on (p, v, Omega) is exact in the difference quotient; the
    // attitude term carries the O(h) error
    if (e3 > 1e-9) {
      EXPECT_NEAR(e3 / e4, 10.0, 1.0);
    }
    EXPECT_LT(e4, 1e-2);
  }
}

TEST(Orthonormality, DriftOverHundredThousandSteps) {
  const QuadParams qp;
  State s;
  s.omega = Vec3(3.0, -2.0, 1.5);
  const Wrench w{qp.hover_thrust(), Vec3::Zero()};
  for (int i = 0; i < 100000; ++i) s = step_forward(s, w, 1e-3, qp);
  EXPECT_LT((s.R.transpose() * s.R - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(s.R.determinant(), 1.0, 1e-9);
}

TEST(StepBackward, HoverUnchanged) {
  const QuadParams qp;
  State s;
  s.p = Vec3(0, 0, 2);
  EXPECT_LT(max_abs_diff(step_backward(s, hover(qp), 1e-3, qp), s), 1e-12);
}

TEST(StepBackward, RoundTripOnRandomPairs) {
  const QuadParams qp;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const State s = random_state(rng);
    const Wrench w = random_wrench(rng, qp);
    const State back = step_backward(step_forward(s, w, 1e-3, qp), w, 1e-3, qp);
    ASSERT_LT(max_abs_diff(back, s), 1e-10) << "sample " << i;
    const State fwd = step_forward(step_backward(s, w, 1e-3, qp), w, 1e-3, qp);
    ASSERT_LT(max_abs_diff(fwd, s), 1e-10) << "sample " << i;
  }
}

TEST(StepBackward, ReportsNonConvergence) {
  QuadParams qp;
  qp.J = Vec3(1e-4, 2e-4, 3e-4).asDiagonal();
  State s;
  s.omega = Vec3(400.0, 300.0, -200.0);
  EXPECT_THROW(step_backward(s, hover(qp), 0.01, qp), IntegrationError);
}

TEST(Mixer, SymmetricThrusts) {
  QuadParams qp;
  qp.d = 0.2;
  qp.c = 0.05;
  const Wrench w = mix(RotorThrusts{{1, 1, 1, 1}}, qp);
  EXPECT_DOUBLE_EQ(w.f, 4.0);
  EXPECT_LT(w.M.norm(), 1e-15);
}

TEST(Mixer, SecondRotorColumn) {
  QuadParams qp;
  qp.d = 0.2;
  qp.c = 0.05;
  const Wrench w = mix(RotorThrusts{{0, 1, 0, 0}}, qp);
  EXPECT_DOUBLE_EQ(w.f, 1.0);
  EXPECT_NEAR(w.M.x(), -0.2, 1e-15);
  EXPECT_NEAR(w.M.y(), 0.0, 1e-15);
  EXPECT_NEAR(w.M.z(), 0.05, 1e-15);
}

TEST(Mixer, UnmixInvertsMix) {
  const QuadParams qp;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, qp.f_rotor_max);
  for (int i = 0; i < 1000; ++i) {
    RotorThrusts t;
    for (auto& f : t.f) f = u(rng);
    const UnmixResult r = unmix(mix(t, qp), qp);
    EXPECT_TRUE(r.feasible);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(r.thrusts.f[k], t.f[k], 1e-12);
  }
}

TEST(Mixer, UnmixFlagsInfeasible) {
  const QuadParams qp;
  EXPECT_FALSE(unmix(Wrench{5.0 * qp.f_rotor_max, Vec3::Zero()}, qp).feasible);
  EXPECT_FALSE(unmix(Wrench{1.0, Vec3(5.0, 0, 0)}, qp).feasible);
}

TEST(Saturate, ClampsEveryRotor) {
  const QuadParams qp;
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    const Wrench w{n(rng), Vec3(n(rng), n(rng), n(rng))};
    const UnmixResult r = unmix(saturate(w, qp), qp);
    for (double f : r.thrusts.f) {
      EXPECT_GE(f, -1e-9);
      EXPECT_LE(f, qp.f_rotor_max + 1e-9);
    }
  }
}

TEST(QuadParams, ValidateRejectsNonPhysical) {
  QuadParams qp;
  qp.m = -1.0;
  EXPECT_THROW(qp.validate(), std::invalid_argument);
  qp = QuadParams{};
  qp.J(0, 0) = -0.01;
  EXPECT_THROW(qp.validate(), std::invalid_argument);
}

TEST(State, QuaternionRoundTrip) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const Configuration c(Vec3(1, 2, 3), random_quaternion(rng));
    const State s = State::at_rest(c);
    const Configuration back = s.configuration();
    EXPECT_LT((back.position() - c.position()).norm(), 1e-12);
    EXPECT_LT((back.orientation().coeffs() - c.orientation().coeffs()).norm(), 1e-9);
  }
}
