#pragma once

#include "kat/planner.hpp"

#include <string>
#include <vector>

namespace kat {

/// A parsed scene file. Walls are kept as specs so sweeps can re-tilt them.
struct SceneFile {
  Aabb bounds;
  std::vector<WallSpec> walls;
  std::vector<Obstacle> boxes;  // free-standing obstacles
  Configuration start;
  Configuration goal;
  GoalTolerance tolerance;
  Problem problem;
};

/// Parses YAML text. Errors are SceneError with "origin:line: field: reason".
SceneFile parse_scene(const std::string& text, const std::string& origin = "<scene>");

/// Reads and parses a file; a missing file is a SceneError naming the path.
SceneFile load_scene(const std::string& path);

/// Same file with every wall's hole tilt replaced; planner settings kept.
Problem with_wall_tilt(const SceneFile& file, double tilt_rad);

/// Orientation from roll/pitch/yaw in radians (R = Rz * Ry * Rx).
Quat from_rpy(double roll, double pitch, double yaw);

}  // namespace kat
