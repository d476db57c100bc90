#include "fixtures.hpp"
#include "kat/batch.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace kat;
using namespace kat::testing;

namespace {

std::vector<Configuration> random_poses(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Configuration> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(Vec3(u(rng), u(rng), u(rng)), Quat(Eigen::AngleAxisd(3.0 * u(rng), random_unit_vector(rng))));
  }
  return out;
}

}  // namespace

TEST(Batch, CollisionFlagsMatchSerialAndScalar) {
  const Scene scene = wall_scene(0.6);
  const RobotBody robot;
  const auto poses = random_poses(2000, 1);
  const auto s = collision_flags(poses, scene, robot, Exec::serial);
  const auto p = collision_flags(poses, scene, robot, Exec::parallel);
  EXPECT_EQ(s, p);
  for (std::size_t i = 0; i < poses.size(); i += 97) EXPECT_EQ(s[i] != 0, is_collision(poses[i], scene, robot));
}

TEST(Batch, LocalMarginsMatchSerialBitForBit) {
  const Scene scene = wall_scene(0.6);
  const RobotBody robot;
  const auto poses = random_poses(1000, 2);
  const auto s = local_margins(poses, scene, robot, Vec3::Zero(), 1.5, Exec::serial);
  const auto p = local_margins(poses, scene, robot, Vec3::Zero(), 1.5, Exec::parallel);
  EXPECT_EQ(s, p);
  for (std::size_t i = 0; i < poses.size(); i += 53) {
    EXPECT_EQ(s[i], local_margin(poses[i], scene, robot, Vec3::Zero(), 1.5));
  }
}

TEST(Batch, DiskGridOptimumMatchesSerial) {
  const Scene scene = wall_scene(0.0);
  const Configuration c(Vec3(0, 0.1, 0.05), Quat::Identity());
  const GridOptimum s = disk_grid_optimum(c, Vec3::UnitX(), 0.3, 0.01, scene, RobotBody{}, 1.5, Exec::serial);
  const GridOptimum p = disk_grid_optimum(c, Vec3::UnitX(), 0.3, 0.01, scene, RobotBody{}, 1.5, Exec::parallel);
  EXPECT_EQ(s.clearance, p.clearance);
  EXPECT_TRUE(s.best == p.best);
  EXPECT_EQ(s.evaluated, p.evaluated);
  // pi r^2 / pitch^2 grid points, give or take the rim
  EXPECT_NEAR(static_cast<double>(s.evaluated), 3.14159 * 900, 200);
  // level slot: the centre is optimal and bounded by the short-axis gap
  EXPECT_NEAR(s.best.position().z(), 0.0, 0.011);
  EXPECT_NEAR(s.clearance, 0.16, 0.011);
}

TEST(Batch, PlaneBasisIsOrthonormal) {
  for (const Vec3& n : {Vec3(Vec3::UnitX()), Vec3(Vec3::UnitZ()), Vec3(1, 2, 3).normalized(), Vec3(0, 0, -1)}) {
    const auto [a, b] = plane_basis(n);
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    EXPECT_NEAR(b.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.dot(b), 0.0, 1e-12);
    EXPECT_NEAR(a.dot(n), 0.0, 1e-12);
    EXPECT_NEAR(b.dot(n), 0.0, 1e-12);
  }
}
