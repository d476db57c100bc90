#pragma once

#include "kat/world.hpp"

#include <vector>

namespace kat {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// implementation; `parallel` uses OpenMP and must return identical values.
enum class Exec { serial, parallel };

std::vector<char> collision_flags(const std::vector<Configuration>& configs, const Scene& scene,
                                  const RobotBody& robot, Exec exec = Exec::parallel);

std::vector<double> local_margins(const std::vector<Configuration>& configs, const Scene& scene,
                                  const RobotBody& robot, const Vec3& center, double radius,
                                  Exec exec = Exec::parallel);

/// Brute-force clearance maximum over positions on a square grid of pitch
/// `pitch` inside the disk of radius `rho` around `center`, in the plane
/// normal to `normal`, with the center orientation held fixed.
struct GridOptimum {
  Configuration best;
  double clearance = 0.0;
  std::size_t evaluated = 0;
};

GridOptimum disk_grid_optimum(const Configuration& center, const Vec3& normal, double rho,
                              double pitch, const Scene& scene, const RobotBody& robot,
                              double delta, Exec exec = Exec::parallel);

/// Two unit vectors spanning the plane normal to n.
std::pair<Vec3, Vec3> plane_basis(const Vec3& n);

}  // namespace kat
