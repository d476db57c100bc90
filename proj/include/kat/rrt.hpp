#pragma once

#include "kat/world.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace kat {

struct HolonomicPath {
  std::vector<Configuration> waypoints;

  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
};

/// Position arc length (m).
double path_length(const HolonomicPath& path);

/// Position arc length plus rho times the summed rotation angle.
double path_cost(const HolonomicPath& path, double rho);

struct RrtParams {
  double goal_bias = 0.1;
  double step = 0.5;              // extension length in the weighted metric
  double rho_rot = 0.0;           // m/rad; <= 0 means robot circumscribed radius
  double edge_resolution = 0.01;  // m
  std::size_t max_nodes = 500000;
  /// Sample orientations as identity only (position-only planning).
  bool fixed_orientation = false;

  void validate() const;
};

enum class RrtVariant { whitelist, conventional };

struct RrtResult {
  bool success = false;
  HolonomicPath path;
  std::size_t sampled_nodes = 0;  // loop iterations, goal-biased ones included
  std::size_t tree_size = 0;
  double wall_time = 0.0;         // s
  /// Node indices in the order they were tested for a direct goal connection.
  std::vector<std::size_t> goal_tests;
};

/// Weighted configuration distance |dp| + rho * angle.
double config_distance(const Configuration& a, const Configuration& b, double rho);

/// Moves from `from` toward `to` by at most `step` in the weighted metric.
Configuration steer(const Configuration& from, const Configuration& to, double step, double rho);

/// RRT in position x SO(3). Throws std::invalid_argument if start or goal
/// collide. The wall-clock budget bounds the search; the result is a
/// deterministic function of the seed whenever the search finishes in time.
RrtResult plan_rrt(const Scene& scene, const RobotBody& robot, std::uint64_t seed, double budget_s,
                   const RrtParams& params, RrtVariant variant);

inline RrtResult plan_whitelist(const Scene& scene, const RobotBody& robot, std::uint64_t seed,
                                double budget_s, const RrtParams& params) {
  return plan_rrt(scene, robot, seed, budget_s, params, RrtVariant::whitelist);
}

inline RrtResult plan_conventional(const Scene& scene, const RobotBody& robot, std::uint64_t seed,
                                   double budget_s, const RrtParams& params) {
  return plan_rrt(scene, robot, seed, budget_s, params, RrtVariant::conventional);
}

/// Random shortcutting between points picked uniformly along the path.
HolonomicPath smooth(const HolonomicPath& path, const Scene& scene, const RobotBody& robot,
                     int iterations, std::uint64_t seed, double resolution = 0.01);

/// Splits every segment into pieces no longer than `spacing` (position, or
/// rotation sweep of the circumscribed radius).
HolonomicPath resample(const HolonomicPath& path, const RobotBody& robot, double spacing);

}  // namespace kat
