#include "fixtures.hpp"
#include "kat/rrt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace kat;
using namespace kat::testing;

namespace {

const Eigen::Vector2d kWideHole(0.6, 0.6);

// wide hole, but the endpoints are offset so no straight line connects them
Scene detour_scene() {
  return wall_scene(0.0, kWideHole).with_endpoints(at(-2.3, 1.4, 1.2), at(2.3, 1.4, -1.2));
}

void expect_valid_path(const HolonomicPath& path, const Scene& scene, const RobotBody& robot) {
  ASSERT_GE(path.size(), 2u);
  EXPECT_TRUE(path.waypoints.front() == scene.start());
  EXPECT_TRUE(path.waypoints.back() == scene.goal());
  for (std::size_t i = 1; i < path.size(); ++i) {
    EXPECT_TRUE(edge_is_free(path.waypoints[i - 1], path.waypoints[i], scene, robot, 0.01)) << "edge " << i;
  }
}

}  // namespace

TEST(RrtMetric, DistanceCombinesPositionAndAngle) {
  const Configuration a = at(0, 0, 0);
  const Configuration b(Vec3(3, 4, 0), Quat(Eigen::AngleAxisd(0.5, Vec3::UnitZ())));
  EXPECT_NEAR(config_distance(a, b, 2.0), 5.0 + 2.0 * 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(config_distance(a, a, 2.0), 0.0);
}

TEST(RrtMetric, SteerStopsAtStepOrTarget) {
  const Configuration a = at(0, 0, 0);
  const Configuration b = at(2, 0, 0);
  EXPECT_TRUE(steer(a, b, 5.0, 1.0) == b);
  const Configuration s = steer(a, b, 0.5, 1.0);
  EXPECT_NEAR(config_distance(a, s, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(s.position().x(), 0.5, 1e-12);
}

TEST(Rrt, EmptySceneConnectsDirectly) {
  const Scene scene = open_scene(at(-2, 0, 0), at(2, 1, 0));
  const RrtResult r = plan_whitelist(scene, RobotBody{}, 1, 10.0, {});
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.path.size(), 2u);
  EXPECT_EQ(r.sampled_nodes, 0u);
  EXPECT_EQ(r.goal_tests, std::vector<std::size_t>{0});
  EXPECT_NEAR(path_length(r.path), std::sqrt(17.0), 1e-12);
}

TEST(Rrt, CollidingEndpointsThrow) {
  const Scene scene = detour_scene();
  EXPECT_THROW(plan_whitelist(scene.with_endpoints(at(0, 2, 0), scene.goal()), RobotBody{}, 0, 1.0, {}),
               std::invalid_argument);
  EXPECT_THROW(plan_whitelist(scene.with_endpoints(scene.start(), at(0, -2, 0)), RobotBody{}, 0, 1.0, {}),
               std::invalid_argument);
}

TEST(Rrt, FindsValidPathThroughWall) {
  const Scene scene = detour_scene();
  const RobotBody robot;
  for (RrtVariant v : {RrtVariant::whitelist, RrtVariant::conventional}) {
    const RrtResult r = plan_rrt(scene, robot, 7, 30.0, {}, v);
    ASSERT_TRUE(r.success);
    expect_valid_path(r.path, scene, robot);
    EXPECT_LE(r.path.size(), r.tree_size + 1);
  }
}

TEST(Rrt, WhitelistNeverRetestsANode) {
  const Scene scene = detour_scene();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RrtResult r = plan_whitelist(scene, RobotBody{}, seed, 30.0, {});
    ASSERT_TRUE(r.success);
    const std::set<std::size_t> unique(r.goal_tests.begin(), r.goal_tests.end());
    EXPECT_EQ(unique.size(), r.goal_tests.size()) << "seed " << seed;
    for (std::size_t idx : r.goal_tests) EXPECT_LT(idx, r.tree_size);
  }
}

TEST(Rrt, ConventionalRetestsNearestNode) {
  const Scene scene = detour_scene();
  bool repeated = false;
  for (std::uint64_t seed = 0; seed < 10 && !repeated; ++seed) {
    const RrtResult r = plan_conventional(scene, RobotBody{}, seed, 30.0, {});
    const std::set<std::size_t> unique(r.goal_tests.begin(), r.goal_tests.end());
    repeated = unique.size() < r.goal_tests.size();
  }
  EXPECT_TRUE(repeated);
}

TEST(Rrt, DeterministicForSeed) {
  const Scene scene = detour_scene();
  const RrtResult a = plan_whitelist(scene, RobotBody{}, 42, 30.0, {});
  const RrtResult b = plan_whitelist(scene, RobotBody{}, 42, 30.0, {});
  ASSERT_TRUE(a.success);
  ASSERT_EQ(a.path.size(), b.path.size());
  for (std::size_t i = 0; i < a.path.size(); ++i) EXPECT_TRUE(a.path.waypoints[i] == b.path.waypoints[i]);
  EXPECT_EQ(a.goal_tests, b.goal_tests);
  EXPECT_EQ(a.sampled_nodes, b.sampled_nodes);
}

TEST(Rrt, VariantsAgreeWithoutObstacles) {
  const Scene scene = open_scene(at(-1, -1, 0), at(1, 1, 1));
  const RrtResult w = plan_whitelist(scene, RobotBody{}, 3, 5.0, {});
  const RrtResult c = plan_conventional(scene, RobotBody{}, 3, 5.0, {});
  EXPECT_EQ(w.goal_tests, c.goal_tests);
  EXPECT_EQ(w.path.size(), c.path.size());
}

TEST(Rrt, FixedOrientationKeepsIdentity) {
  const Scene scene = detour_scene();
  RrtParams p;
  p.fixed_orientation = true;
  const RrtResult r = plan_whitelist(scene, RobotBody{}, 5, 30.0, p);
  ASSERT_TRUE(r.success);
  for (const auto& c : r.path.waypoints) EXPECT_TRUE(c.orientation().isApprox(Quat::Identity()));
}

TEST(Rrt, ZeroBudgetGivesUpWithoutThrowing) {
  const Scene scene = detour_scene();
  const RrtResult r = plan_whitelist(scene, RobotBody{}, 5, 1e-9, {});
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.path.empty());
}

TEST(Rrt, ParamsValidation) {
  RrtParams p;
  p.goal_bias = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = RrtParams{};
  p.step = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Smooth, ShortensAndStaysFree) {
  const Scene scene = detour_scene();
  const RobotBody robot;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RrtResult r = plan_whitelist(scene, robot, seed, 30.0, {});
    ASSERT_TRUE(r.success);
    const HolonomicPath s = smooth(r.path, scene, robot, 200, seed);
    expect_valid_path(s, scene, robot);
    EXPECT_LE(path_length(s), path_length(r.path) + 1e-9);
    const HolonomicPath again = smooth(r.path, scene, robot, 200, seed);
    EXPECT_EQ(again.size(), s.size());
  }
}

TEST(Smooth, StraightPathUnchanged) {
  const Scene scene = open_scene(at(-1, 0, 0), at(1, 0, 0));
  const HolonomicPath p{{scene.start(), scene.goal()}};
  EXPECT_EQ(smooth(p, scene, RobotBody{}, 50, 0).size(), 2u);
}

TEST(Resample, SpacingBoundAndEndpoints) {
  const RobotBody robot;
  const HolonomicPath p{{at(0, 0, 0), at(1, 0, 0),
                         Configuration(Vec3(1, 1, 0), Quat(Eigen::AngleAxisd(1.0, Vec3::UnitZ())))}};
  const HolonomicPath r = resample(p, robot, 0.1);
  EXPECT_TRUE(r.waypoints.front() == p.waypoints.front());
  EXPECT_TRUE(r.waypoints.back() == p.waypoints.back());
  const double rc = robot.circumscribed_radius();
  for (std::size_t i = 1; i < r.size(); ++i) {
    const auto& a = r.waypoints[i - 1];
    const auto& b = r.waypoints[i];
    EXPECT_LE((a.position() - b.position()).norm(), 0.1 + 1e-12);
    EXPECT_LE(rc * rotation_angle(a.orientation(), b.orientation()), 0.1 + 1e-9);
  }
  EXPECT_NEAR(path_length(r), path_length(p), 1e-9);
  EXPECT_THROW(resample(p, robot, 0.0), std::invalid_argument);
}

TEST(PathMeasures, LengthAndCost) {
  const HolonomicPath p{{at(0, 0, 0), Configuration(Vec3(0, 3, 4), Quat(Eigen::AngleAxisd(0.25, Vec3::UnitX())))}};
  EXPECT_NEAR(path_length(p), 5.0, 1e-12);
  EXPECT_NEAR(path_cost(p, 4.0), 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(path_length(HolonomicPath{}), 0.0);
}
