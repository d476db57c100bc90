#pragma once

#include "kat/world.hpp"

#include <vector>

namespace kat::testing {

inline Configuration at(double x, double y, double z) { return Configuration(Vec3(x, y, z), Quat::Identity()); }

/// Wall in the x = 0 plane with a slot tilted by `tilt` about the wall normal.
inline WallSpec wall_at(double x, double tilt, Eigen::Vector2d hole = Eigen::Vector2d(0.6, 0.26)) {
  WallSpec w;
  w.center = Vec3(x, 0.0, 0.0);
  w.half_extents = Vec3(0.1, 3.0, 3.0);
  w.hole_half_extents = hole;
  w.tilt = tilt;
  return w;
}

/// Single wall between x = -2.3 and x = 2.3.
inline Scene wall_scene(double tilt, Eigen::Vector2d hole = Eigen::Vector2d(0.6, 0.26)) {
  return Scene(Aabb{Vec3(-3, -2, -2), Vec3(3, 2, 2)}, wall_with_hole(wall_at(0.0, tilt, hole)), at(-2.3, 0, 0),
               at(2.3, 0, 0));
}

/// Two walls at x = 0 and x = 3.5.
inline Scene dual_wall_scene(double tilt) {
  std::vector<Obstacle> obs = wall_with_hole(wall_at(0.0, tilt));
  const auto second = wall_with_hole(wall_at(3.5, tilt));
  obs.insert(obs.end(), second.begin(), second.end());
  return Scene(Aabb{Vec3(-3, -2, -2), Vec3(6.5, 2, 2)}, std::move(obs), at(-2.3, 0, 0), at(5.8, 0, 0));
}

inline Scene open_scene(const Configuration& start, const Configuration& goal) {
  return Scene(Aabb{Vec3(-5, -5, -5), Vec3(5, 5, 5)}, {}, start, goal);
}

}  // namespace kat::testing
