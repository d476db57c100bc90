#pragma once

#include "kat/rrt.hpp"

#include <random>
#include <stdexcept>
#include <vector>

namespace kat {

class NarrowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How many of the six axis-aligned position probes at offset h collide.
int colliding_probes(const Configuration& c, const Scene& scene, const RobotBody& robot, double h);

/// Waypoints of `path` resampled at spacing h with at least four colliding
/// probes, in path order.
std::vector<Configuration> narrow_points(const HolonomicPath& path, const Scene& scene,
                                         const RobotBody& robot, double h);

/// Unit quaternion maximizing sum (q . q_i)^2, on the q_r >= 0 hemisphere.
Quat chordal_mean(const std::vector<Quat>& qs);

/// Single-linkage groups (position distance <= link_radius). Each centroid
/// has the mean position and chordal-mean orientation of its members.
/// Clusters are ordered by their earliest member.
std::vector<Configuration> cluster_centroids(const std::vector<Configuration>& points,
                                             double link_radius);

/// Member lists behind cluster_centroids(), same order.
std::vector<std::vector<std::size_t>> cluster_members(const std::vector<Configuration>& points,
                                                      double link_radius);

/// Central-difference direction at the waypoint nearest to `center`
/// (earliest index on ties), pointing along increasing path index. With
/// span > 0 the stencil ends lie `span` metres of arc length to either side;
/// otherwise the neighbouring waypoints are used.
Vec3 path_tangent(const HolonomicPath& path, const Configuration& center, double span = 0.0);

enum class MarginObjective {
  clearance,    // maximize distance to obstacles near the center
  summed_sq,    // minimize summed squared distance to sampled colliding poses
};

struct MarginSettings {
  double rho = 0.5;               // m, disk radius
  int n_samples = 200;
  double delta = 1.0;             // m, obstacle neighbourhood radius
  double theta_max = 0.2617993877991494;  // rad (15 deg)
  MarginObjective objective = MarginObjective::clearance;
  bool refine = true;             // pattern search after sampling (clearance only)

  void validate() const;
};

struct MarginSample {
  Configuration config;
  double score = 0.0;      // objective value, larger is better
  double clearance = 0.0;  // local clearance of config
  int free_samples = 0;
};

/// Best collision-free pose in the plane through `center` normal to
/// `tangent`, orientation within theta_max of the center's. Throws
/// NarrowError when nothing collision-free is found.
MarginSample max_margin_sample(const Configuration& center, const Vec3& tangent, const Scene& scene,
                               const RobotBody& robot, const MarginSettings& settings,
                               std::mt19937_64& rng);

struct NarrowCluster {
  Configuration center;
  Configuration refined;
  Vec3 tangent = Vec3::UnitX();
  std::vector<Configuration> members;
};

}  // namespace kat
