#include "kat/control.hpp"
#include "kat/rollout.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kat;

namespace {

Scene open_space() {
  return Scene(Aabb{Vec3(-50, -50, -50), Vec3(50, 50, 50)}, {}, Configuration(), Configuration());
}

// Moderate perturbation around hover: tilt up to ~0.5 rad, yaw up to 1 rad.
State perturbed(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Quat q = Quat(Eigen::AngleAxisd(u(rng), Vec3::UnitZ())) *
                 Quat(Eigen::AngleAxisd(0.35 * u(rng), Vec3::UnitX())) *
                 Quat(Eigen::AngleAxisd(0.35 * u(rng), Vec3::UnitY()));
  State s = State::at_rest(Configuration(Vec3::Zero(), q));
  s.v = 2.0 * Vec3(u(rng), u(rng), u(rng));
  s.omega = Vec3(u(rng), u(rng), u(rng));
  return s;
}

void expect_wrench_near(const Wrench& a, const Wrench& b, double tol) {
  EXPECT_NEAR(a.f, b.f, tol);
  EXPECT_LE((a.M - b.M).norm(), tol);
}

}  // namespace

TEST(Controller, HoverAtRestCommandsWeight) {
  const QuadParams qp;
  const ControllerGains g;
  const Wrench w = forward_control(State{}, qp, g);
  EXPECT_NEAR(w.f, qp.m * qp.g, 1e-12);
  EXPECT_LT(w.M.norm(), 1e-12);
  expect_wrench_near(backward_control(State{}, qp, g), w, 1e-12);
}

TEST(Controller, VelocityFeedbackTiltsAgainstMotion) {
  const QuadParams qp;
  const ControllerGains g;
  State s;
  s.v = Vec3(1.0, 0.0, 0.0);
  // pitch moment that rotates the thrust axis toward -x
  EXPECT_LT(forward_control_raw(s, qp, g).M.y(), 0.0);
  s.v = Vec3(0.0, 0.0, -1.0);
  EXPECT_GT(forward_control_raw(s, qp, g).f, qp.m * qp.g);
}

TEST(Controller, SaturatedOutputIsRealizable) {
  const QuadParams qp;
  const ControllerGains g;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    State s;
    s.R = random_quaternion(rng).toRotationMatrix();
    s.v = 10.0 * Vec3(n(rng), n(rng), n(rng));
    s.omega = 10.0 * Vec3(n(rng), n(rng), n(rng));
    for (const Wrench& w : {forward_control(s, qp, g), backward_control(s, qp, g)}) {
      const UnmixResult r = unmix(w, qp);
      for (double f : r.thrusts.f) {
        EXPECT_GE(f, -1e-9);
        EXPECT_LE(f, qp.f_rotor_max + 1e-9);
      }
    }
  }
}

TEST(Controller, BackwardIsForwardOnMirroredState) {
  const QuadParams qp;
  const ControllerGains g;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const State s = perturbed(rng);
    expect_wrench_near(backward_control_raw(s, qp, g), forward_control_raw(mirrored(s), qp, g), 0.0);
    const State mm = mirrored(mirrored(s));
    EXPECT_EQ(mm.v, s.v);
    EXPECT_EQ(mm.omega, s.omega);
    EXPECT_EQ(mm.R, s.R);
  }
}

TEST(Controller, GainValidation) {
  ControllerGains g;
  EXPECT_NO_THROW(g.validate());
  g.k_v = 0.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = ControllerGains{};
  g.max_tilt = 2.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(PrintedLaw, YMatrixSwapsTiltAxes) {
  const Mat3 y = printed::y_matrix();
  EXPECT_EQ(y * Vec3(1, 2, 3), Vec3(2, 1, 0));
}

TEST(PrintedLaw, ForwardBackwardPairIdentities) {
  const QuadParams qp;
  const ControllerGains g;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    State s;
    s.R = random_quaternion(rng).toRotationMatrix();
    s.v = Vec3(n(rng), n(rng), n(rng));
    s.omega = Vec3(n(rng), n(rng), n(rng));
    const Wrench f = printed::forward(s, qp, g);
    const Wrench b = printed::backward(s, qp, g);
    EXPECT_LT((f.M + b.M).norm(), 1e-12);
    const double e3_proj = (s.R * kGravityDir).dot(kGravityDir);
    EXPECT_NEAR(f.f + b.f, 2.0 * qp.m * qp.g * e3_proj, 1e-12);
  }
}

TEST(PrintedLaw, SelectedByGains) {
  const QuadParams qp;
  ControllerGains g;
  g.law = ControlLaw::printed;
  State s;
  s.v = Vec3(0.3, -0.2, 0.1);
  s.omega = Vec3(0.1, 0.2, -0.3);
  expect_wrench_near(forward_control_raw(s, qp, g), printed::forward(s, qp, g), 0.0);
  expect_wrench_near(backward_control_raw(s, qp, g), printed::backward(s, qp, g), 0.0);
}

TEST(HolonomicMeasure, Examples) {
  const HolonomicWeights w;
  EXPECT_DOUBLE_EQ(holonomic_measure(State{}, w), 0.0);
  State s;
  s.v = Vec3(0.0, 0.1, 0.0);
  EXPECT_NEAR(holonomic_measure(s, w), 0.1 * w.w_v, 1e-15);
  s = State{};
  s.omega = Vec3(0.0, 0.0, 0.5);
  EXPECT_NEAR(holonomic_measure(s, w), 0.5 * w.w_omega, 1e-15);
  // half-angle a/2 about x: |q - 1| = sqrt((1 - cos(a/2))^2 + sin(a/2)^2)
  const double a = 0.2;
  s = State::at_rest(Configuration(Vec3::Zero(), Quat(Eigen::AngleAxisd(a, Vec3::UnitX()))));
  EXPECT_NEAR(holonomic_measure(s, w), w.w_r * std::sqrt(2.0 - 2.0 * std::cos(a / 2)), 1e-12);
}

TEST(HolonomicMeasure, ThresholdIsStrict) {
  HolonomicWeights w;
  State s;
  s.v = Vec3(w.epsilon / w.w_v, 0.0, 0.0);
  EXPECT_FALSE(is_near_holonomic(s, w));
  s.v *= 0.999;
  EXPECT_TRUE(is_near_holonomic(s, w));
}

TEST(HolonomicMeasure, SignOfQuaternionIgnored) {
  const HolonomicWeights w;
  const Quat q(Eigen::AngleAxisd(0.1, Vec3(1, 1, 0).normalized()));
  State a = State::at_rest(Configuration(Vec3::Zero(), q));
  State b = a;
  b.R = Quat(-q.w(), -q.x(), -q.y(), -q.z()).toRotationMatrix();
  EXPECT_DOUBLE_EQ(holonomic_measure(a, w), holonomic_measure(b, w));
}

TEST(Rollout, AlreadyHolonomicReturnsSeedOnly) {
  const Scene scene = open_space();
  const RobotBody robot;
  const RolloutResult r = rollout(State{}, RolloutDirection::forward, scene, robot, {}, {}, {}, {});
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.trajectory.size(), 1u);
  EXPECT_DOUBLE_EQ(r.t_end, 0.0);
}

TEST(Rollout, StartInCollisionFails) {
  const Scene scene(Aabb{Vec3(-5, -5, -5), Vec3(5, 5, 5)}, {Obstacle{Vec3::Zero(), Vec3(1, 1, 1), Quat::Identity()}},
                    Configuration(Vec3(3, 0, 0), Quat::Identity()), Configuration(Vec3(-3, 0, 0), Quat::Identity()));
  const RobotBody robot;
  State s;
  s.v = Vec3(1, 0, 0);
  const RolloutResult r = rollout(s, RolloutDirection::forward, scene, robot, {}, {}, {}, {});
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure, RolloutFailure::collision);
}

TEST(Rollout, RunningIntoWallIsCollision) {
  const Scene scene(Aabb{Vec3(-5, -5, -5), Vec3(5, 5, 5)}, {Obstacle{Vec3(1.2, 0, 0), Vec3(0.1, 4, 4), Quat::Identity()}},
                    Configuration(), Configuration(Vec3(-3, 0, 0), Quat::Identity()));
  State s;
  s.v = Vec3(4.0, 0, 0);
  const RolloutResult r = rollout(s, RolloutDirection::forward, scene, RobotBody{}, {}, {}, {}, {});
  EXPECT_EQ(r.failure, RolloutFailure::collision);
}

TEST(Rollout, TimeoutWhenHorizonTooShort) {
  State s;
  s.v = Vec3(3.0, 0, 0);
  RolloutSettings rs;
  rs.t_max = 0.05;
  const RolloutResult r = rollout(s, RolloutDirection::forward, open_space(), RobotBody{}, {}, {}, {}, rs);
  EXPECT_EQ(r.failure, RolloutFailure::timeout);
  EXPECT_EQ(r.trajectory.size(), 51u);
}

TEST(Rollout, ForwardStabilizesFromPerturbedStates) {
  const Scene scene = open_space();
  std::mt19937_64 rng(2024);
  const HolonomicWeights w;
  for (int i = 0; i < 100; ++i) {
    const State s0 = perturbed(rng);
    const RolloutResult r = rollout(s0, RolloutDirection::forward, scene, RobotBody{}, {}, {}, w, {});
    ASSERT_TRUE(r.success) << "seed state " << i << " failed: " << to_string(r.failure);
    EXPECT_TRUE(is_near_holonomic(r.trajectory.back(), w));
    EXPECT_LT(forward_replay_error(r.trajectory, QuadParams{}), 1e-9);
  }
}

TEST(Rollout, BackwardEndsOnSeedAndReplaysForward) {
  const Scene scene = open_space();
  std::mt19937_64 rng(77);
  const HolonomicWeights w;
  for (int i = 0; i < 100; ++i) {
    const State s0 = perturbed(rng);
    const RolloutResult r = rollout(s0, RolloutDirection::backward, scene, RobotBody{}, {}, {}, w, {});
    ASSERT_TRUE(r.success) << "seed state " << i << " failed: " << to_string(r.failure);
    EXPECT_TRUE(is_near_holonomic(r.trajectory.front(), w));
    const State& last = r.trajectory.back();
    EXPECT_EQ(last.p, s0.p);
    EXPECT_EQ(last.v, s0.v);
    EXPECT_EQ(last.omega, s0.omega);
    EXPECT_DOUBLE_EQ(r.trajectory.samples.front().t, 0.0);
    EXPECT_LT(forward_replay_error(r.trajectory, QuadParams{}), 1e-6);
  }
}
