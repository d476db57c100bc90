#include "kat/batch.hpp"

#include <cmath>

namespace kat {

std::vector<char> collision_flags(const std::vector<Configuration>& configs, const Scene& scene,
                                  const RobotBody& robot, Exec exec) {
  const auto n = static_cast<long>(configs.size());
  std::vector<char> out(configs.size(), 0);
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) out[i] = is_collision(configs[i], scene, robot) ? 1 : 0;
    return out;
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) out[i] = is_collision(configs[i], scene, robot) ? 1 : 0;
  return out;
}

std::vector<double> local_margins(const std::vector<Configuration>& configs, const Scene& scene,
                                  const RobotBody& robot, const Vec3& center, double radius,
                                  Exec exec) {
  const auto n = static_cast<long>(configs.size());
  std::vector<double> out(configs.size(), 0.0);
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) out[i] = local_margin(configs[i], scene, robot, center, radius);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) out[i] = local_margin(configs[i], scene, robot, center, radius);
  return out;
}

std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 u = n.normalized();
  // least-aligned world axis keeps the cross product well conditioned
  Eigen::Index axis = 0;
  u.cwiseAbs().minCoeff(&axis);
  const Vec3 e1 = u.cross(Vec3::Unit(axis)).normalized();
  const Vec3 e2 = u.cross(e1);
  return {e1, e2};
}

GridOptimum disk_grid_optimum(const Configuration& center, const Vec3& normal, double rho,
                              double pitch, const Scene& scene, const RobotBody& robot,
                              double delta, Exec exec) {
  const auto [e1, e2] = plane_basis(normal);
  const int k = static_cast<int>(std::floor(rho / pitch));
  std::vector<Configuration> grid;
  for (int i = -k; i <= k; ++i) {
    for (int j = -k; j <= k; ++j) {
      const double a = i * pitch;
      const double b = j * pitch;
      if (a * a + b * b > rho * rho) continue;
      grid.push_back(center.translated(a * e1 + b * e2));
    }
  }
  const std::vector<double> m = local_margins(grid, scene, robot, center.position(), delta, exec);
  GridOptimum out;
  out.evaluated = grid.size();
  out.best = center;
  out.clearance = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (m[i] > out.clearance) {
      out.clearance = m[i];
      out.best = grid[i];
    }
  }
  return out;
}

}  // namespace kat
