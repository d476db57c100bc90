#pragma once

#include "kat/geometry.hpp"
#include "kat/obb.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace kat {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collision geometry of the quadcopter: one box aligned with the body frame.
class RobotBody {
 public:
  RobotBody() : RobotBody(Vec3(0.3, 0.3, 0.1)) {}
  explicit RobotBody(const Vec3& half_extents);

  const Vec3& half_extents() const { return half_extents_; }
  double circumscribed_radius() const { return half_extents_.norm(); }
  Obb at(const Configuration& c) const;

  /// Among the orientations that place the box on the same point set as q
  /// (right-multiplication by a symmetry of the box), the one closest to
  /// identity.
  Quat nearest_equivalent_to_identity(const Quat& q) const;

 private:
  Vec3 half_extents_;
  std::vector<Quat> symmetries_;
};

struct Obstacle {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  Quat orientation = Quat::Identity();

  Obb box() const;
};

struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  bool intersects(const Obb& box) const;
};

struct GoalTolerance {
  double position = 0.05;  // m
  double angle = 0.1;      // rad
};

/// Workspace, obstacles and the start/goal poses. Immutable after construction.
class Scene {
 public:
  /// Unit workspace, no obstacles, start = goal = origin.
  Scene() : Scene(Aabb{Vec3::Zero(), Vec3::Ones()}, {}, Configuration(), Configuration()) {}
  Scene(const Aabb& bounds, std::vector<Obstacle> obstacles, const Configuration& start,
        const Configuration& goal, const GoalTolerance& tolerance = {});

  const Aabb& bounds() const { return bounds_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  const std::vector<Obb>& boxes() const { return boxes_; }
  const Configuration& start() const { return start_; }
  const Configuration& goal() const { return goal_; }
  const GoalTolerance& tolerance() const { return tolerance_; }

  /// Same workspace with different endpoints (used for connector planning).
  Scene with_endpoints(const Configuration& start, const Configuration& goal) const;

  /// Throws SceneError if an obstacle misses the workspace or if start/goal
  /// are in collision for `robot`.
  void validate(const RobotBody& robot) const;

 private:
  Aabb bounds_;
  std::vector<Obstacle> obstacles_;
  std::vector<Obb> boxes_;
  Configuration start_;
  Configuration goal_;
  GoalTolerance tolerance_;
};

bool is_collision(const Configuration& c, const Scene& scene, const RobotBody& robot);

/// Interpolates c1 -> c2 with position step <= resolution and rotation step
/// <= resolution / circumscribed radius; endpoints included.
bool edge_is_free(const Configuration& c1, const Configuration& c2, const Scene& scene,
                  const RobotBody& robot, double resolution);

/// Number of interpolation intervals edge_is_free() uses for this edge.
int edge_steps(const Configuration& c1, const Configuration& c2, const RobotBody& robot,
               double resolution);

/// Minimum distance from the robot to any obstacle; +inf without obstacles,
/// 0 in collision. Workspace bounds are not counted.
double margin(const Configuration& c, const Scene& scene, const RobotBody& robot);

/// margin() restricted to obstacles within `radius` of `center`.
double local_margin(const Configuration& c, const Scene& scene, const RobotBody& robot,
                    const Vec3& center, double radius);

/// Planar wall with a rectangular hole. The wall frame has x along the wall
/// normal (thickness), y horizontal and z vertical in the wall plane. The
/// panel is rotated by `tilt` about the wall normal, so the hole's long axis
/// makes an angle `tilt` with the horizontal.
struct WallSpec {
  Vec3 center = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 half_extents = Vec3(0.1, 4.0, 4.0);  // (thickness/2, half width, half height)
  Eigen::Vector2d hole_center = Eigen::Vector2d::Zero();  // panel coordinates
  Eigen::Vector2d hole_half_extents = Eigen::Vector2d(0.6, 0.26);  // (long, short)
  double tilt = 0.0;  // rad
};

/// Four boxes tiling the panel minus the hole. Throws SceneError if the hole
/// does not fit strictly inside the panel.
std::vector<Obstacle> wall_with_hole(const WallSpec& wall);

/// Rotation carrying the wall frame into the hole-aligned panel frame.
Quat wall_panel_orientation(const WallSpec& wall);

}  // namespace kat
