#include "fixtures.hpp"
#include "kat/escape.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kat;
using namespace kat::testing;

TEST(WeightedEscape, Examples) {
  const std::vector<Vec3> dirs{Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitX()};
  EscapeDirection e = weighted_escape(dirs, {1.0, 1.0, 0.5}, {0, 0, 1});
  EXPECT_TRUE(e.dir.isApprox(Vec3(1, 1, 0).normalized()));
  EXPECT_EQ(e.support, 2);
  e = weighted_escape(dirs, {2.0, 1.0, 1.0}, {0, 1, 0});
  EXPECT_TRUE(e.dir.isApprox(Vec3::UnitX()));
  EXPECT_EQ(e.support, 2);
  e = weighted_escape({Vec3::UnitX(), Vec3::UnitY()}, {3.0, 1.0}, {0, 0});
  EXPECT_TRUE(e.dir.isApprox(Vec3(3, 1, 0).normalized()));
}

TEST(WeightedEscape, Failures) {
  EXPECT_THROW(weighted_escape({Vec3::UnitX()}, {1.0}, {1}), EscapeError);
  EXPECT_THROW(weighted_escape({Vec3::UnitX(), -Vec3::UnitX()}, {1.0, 1.0}, {0, 0}), EscapeError);
  EXPECT_THROW(weighted_escape({}, {}, {}), EscapeError);
  EXPECT_THROW(weighted_escape({Vec3::UnitX()}, {1.0, 2.0}, {0}), std::invalid_argument);
}

TEST(EscapeDirection, UnitAndAgreesWithNarrowDirection) {
  const Scene scene = wall_scene(0.0);
  const RobotBody robot;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Vec3 d_nar = Vec3(1.0, 0.3 * std::sin(i), 0.2 * std::cos(i)).normalized();
    const EscapeDirection e = escape_direction(at(0, 0, 0), d_nar, scene, robot, {}, rng);
    EXPECT_NEAR(e.dir.norm(), 1.0, 1e-12);
    EXPECT_GT(e.dir.dot(d_nar), 0.0);
    EXPECT_GT(e.support, 0);
  }
}

TEST(EscapeDirection, OpenSpaceConvergesToNarrowDirection) {
  // without obstacles the survivors fill the half-sphere around d_nar
  const Scene scene = open_scene(at(-1, 0, 0), at(1, 0, 0));
  const Vec3 d_nar = Vec3(1, 2, -1).normalized();
  EscapeSettings s;
  s.n = 10000;
  std::mt19937_64 rng(123);
  const EscapeDirection e = escape_direction(at(0, 0, 0), d_nar, scene, RobotBody{}, s, rng);
  const double angle = std::acos(std::clamp(e.dir.dot(d_nar), -1.0, 1.0));
  EXPECT_LT(angle, 5.0 * std::numbers::pi / 180.0);
  EXPECT_NEAR(e.support, s.n / 2, 4 * std::sqrt(s.n / 4.0));
}

TEST(EscapeDirection, WallBehindDoesNotPullBackward) {
  // narrow pose just past a wall: backward samples are discarded anyway, and
  // forward ones are free, so the result stays forward
  const Scene scene = wall_scene(0.0);
  std::mt19937_64 rng(8);
  const EscapeDirection e = escape_direction(at(0.5, 0, 0), Vec3::UnitX(), scene, RobotBody{}, {}, rng);
  EXPECT_GT(e.dir.x(), 0.9);
}

TEST(EscapeDirection, FullyEnclosedThrows) {
  // open only toward -x: a slab ahead and tight side walls
  const std::vector<Obstacle> box{
      {Vec3(1.0, 0, 0), Vec3(0.45, 4, 4), Quat::Identity()},  {Vec3(0, 1.0, 0), Vec3(4, 0.55, 4), Quat::Identity()},
      {Vec3(0, -1.0, 0), Vec3(4, 0.55, 4), Quat::Identity()}, {Vec3(0, 0, 1.0), Vec3(4, 4, 0.65), Quat::Identity()},
      {Vec3(0, 0, -1.0), Vec3(4, 4, 0.65), Quat::Identity()}};
  const Scene scene(Aabb{Vec3(-5, -5, -5), Vec3(5, 5, 5)}, box, at(0, 0, 0), at(-4, 0, 0));
  EscapeSettings s;
  s.mu = 0.8;
  s.sigma = 0.05;
  std::mt19937_64 rng(2);
  EXPECT_THROW(escape_direction(at(0, 0, 0), Vec3::UnitX(), scene, RobotBody{}, s, rng), EscapeError);
}

TEST(EscapeDirection, Deterministic) {
  const Scene scene = wall_scene(0.3);
  std::mt19937_64 a(77), b(77);
  const auto x = escape_direction(at(0, 0, 0), Vec3::UnitX(), scene, RobotBody{}, {}, a);
  const auto y = escape_direction(at(0, 0, 0), Vec3::UnitX(), scene, RobotBody{}, {}, b);
  EXPECT_EQ(x.dir, y.dir);
  EXPECT_EQ(x.support, y.support);
}

TEST(PositiveNormal, AlwaysPositive) {
  std::mt19937_64 rng(3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double t = positive_normal(0.1, 1.0, rng);
    ASSERT_GT(t, 0.0);
    sum += t;
  }
  // truncated normal mean: mu + sigma phi(a) / (1 - Phi(a)), a = -mu / sigma
  const double a = -0.1;
  const double phi = std::exp(-0.5 * a * a) / std::sqrt(2 * std::numbers::pi);
  const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));
  EXPECT_NEAR(sum / 20000, 0.1 + phi / tail, 0.02);
  EXPECT_DOUBLE_EQ(positive_normal(0.7, 0.0, rng), 0.7);
}

TEST(EscapeSettings, Validation) {
  EscapeSettings s;
  s.n = 4;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = EscapeSettings{};
  s.mu = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}
