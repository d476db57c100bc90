#include "kat/rrt.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

namespace kat {

void RrtParams::validate() const {
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw std::invalid_argument("goal_bias must lie in [0, 1]");
  if (!(step > 0.0)) throw std::invalid_argument("rrt step must be positive");
  if (!(edge_resolution > 0.0)) throw std::invalid_argument("edge_resolution must be positive");
  if (max_nodes < 2) throw std::invalid_argument("max_nodes must be at least 2");
}

double path_length(const HolonomicPath& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    len += (path.waypoints[i].position() - path.waypoints[i - 1].position()).norm();
  }
  return len;
}

double path_cost(const HolonomicPath& path, double rho) {
  double cost = 0.0;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    cost += config_distance(path.waypoints[i - 1], path.waypoints[i], rho);
  }
  return cost;
}

double config_distance(const Configuration& a, const Configuration& b, double rho) {
  return (a.position() - b.position()).norm() + rho * rotation_angle(a.orientation(), b.orientation());
}

Configuration steer(const Configuration& from, const Configuration& to, double step, double rho) {
  const double d = config_distance(from, to, rho);
  if (d <= step) return to;
  return Configuration::interpolate(from, to, step / d);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Tree {
 public:
  explicit Tree(double rho) : rho_(rho) {}

  std::size_t add(const Configuration& c, std::size_t parent) {
    nodes_.push_back(c);
    positions_.push_back(c.position());
    parents_.push_back(parent);
    return nodes_.size() - 1;
  }

  // Exact scans; |dp| <= distance lets most nodes be rejected before the
  // rotation term is evaluated.
  std::size_t nearest(const Configuration& q) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if ((positions_[i] - q.position()).squaredNorm() >= best_d * best_d) continue;
      const double d = config_distance(nodes_[i], q, rho_);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  // Nearest among `candidates` (ascending indices, so the first minimum is
  // the lowest index); returns the position inside `candidates`.
  std::size_t nearest_of(const std::vector<std::size_t>& candidates, const Configuration& q) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if ((positions_[candidates[k]] - q.position()).squaredNorm() >= best_d * best_d) continue;
      const double d = config_distance(nodes_[candidates[k]], q, rho_);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  }

  const Configuration& node(std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }

  std::vector<Configuration> branch(std::size_t leaf) const {
    std::vector<Configuration> out;
    for (std::size_t i = leaf;; i = parents_[i]) {
      out.push_back(nodes_[i]);
      if (i == 0) break;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  double rho_;
  std::vector<Configuration> nodes_;
  std::vector<Vec3> positions_;
  std::vector<std::size_t> parents_;
};

Configuration sample_configuration(const Aabb& bounds, bool fixed_orientation, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 p;
  for (int k = 0; k < 3; ++k) p[k] = bounds.lo[k] + u(rng) * (bounds.hi[k] - bounds.lo[k]);
  // the quaternion is drawn regardless so both modes consume the stream alike
  const Quat q = random_quaternion(rng);
  return Configuration(p, fixed_orientation ? Quat::Identity() : q);
}

}  // namespace

RrtResult plan_rrt(const Scene& scene, const RobotBody& robot, std::uint64_t seed, double budget_s,
                   const RrtParams& params, RrtVariant variant) {
  params.validate();
  if (is_collision(scene.start(), scene, robot)) throw std::invalid_argument("rrt: start configuration in collision");
  if (is_collision(scene.goal(), scene, robot)) throw std::invalid_argument("rrt: goal configuration in collision");

  const auto t0 = Clock::now();
  const double rho = params.rho_rot > 0.0 ? params.rho_rot : robot.circumscribed_radius();
  const Configuration& goal = scene.goal();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  RrtResult out;
  Tree tree(rho);
  tree.add(scene.start(), 0);
  std::vector<std::size_t> whitelist{0};

  auto finish = [&](std::size_t leaf) {
    std::vector<Configuration> branch = tree.branch(leaf);
    if (!(branch.back() == goal)) branch.push_back(goal);
    out.success = true;
    out.path.waypoints = std::move(branch);
  };

  auto goal_test = [&](std::size_t idx) {
    out.goal_tests.push_back(idx);
    return edge_is_free(tree.node(idx), goal, scene, robot, params.edge_resolution);
  };

  // the root is tested once up front in both variants
  whitelist.clear();
  if (goal_test(0)) {
    finish(0);
  }

  while (!out.success && tree.size() < params.max_nodes) {
    if (seconds_since(t0) > budget_s) break;
    ++out.sampled_nodes;
    if (coin(rng) < params.goal_bias) {
      std::size_t idx;
      if (variant == RrtVariant::whitelist) {
        if (whitelist.empty()) continue;
        const std::size_t k = tree.nearest_of(whitelist, goal);
        idx = whitelist[k];
        whitelist.erase(whitelist.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        idx = tree.nearest(goal);
      }
      if (goal_test(idx)) finish(idx);
      continue;
    }
    const Configuration q_rand = sample_configuration(scene.bounds(), params.fixed_orientation, rng);
    const std::size_t near = tree.nearest(q_rand);
    const Configuration q_new = steer(tree.node(near), q_rand, params.step, rho);
    if (!edge_is_free(tree.node(near), q_new, scene, robot, params.edge_resolution)) continue;
    whitelist.push_back(tree.add(q_new, near));
  }

  out.tree_size = tree.size();
  out.wall_time = seconds_since(t0);
  return out;
}

HolonomicPath smooth(const HolonomicPath& path, const Scene& scene, const RobotBody& robot,
                     int iterations, std::uint64_t seed, double resolution) {
  if (path.size() < 3) return path;
  std::vector<Configuration> pts = path.waypoints;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // point at parameter s in [0, n-1] along the polyline
  auto at = [&](double s) {
    const auto i = std::min(static_cast<std::size_t>(s), pts.size() - 2);
    return Configuration::interpolate(pts[i], pts[i + 1], s - static_cast<double>(i));
  };

  for (int it = 0; it < iterations && pts.size() > 2; ++it) {
    const double span = static_cast<double>(pts.size() - 1);
    double a = u(rng) * span;
    double b = u(rng) * span;
    if (a > b) std::swap(a, b);
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    if (ib <= ia) continue;  // same segment, nothing to cut
    const Configuration ca = at(a);
    const Configuration cb = at(b);
    if (!edge_is_free(ca, cb, scene, robot, resolution)) continue;
    std::vector<Configuration> next;
    next.reserve(pts.size());
    next.insert(next.end(), pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(ia) + 1);
    if (!(ca == next.back())) next.push_back(ca);
    if (!(cb == pts[ib + 1])) next.push_back(cb);
    next.insert(next.end(), pts.begin() + static_cast<std::ptrdiff_t>(ib) + 1, pts.end());
    pts = std::move(next);
  }
  return HolonomicPath{std::move(pts)};
}

HolonomicPath resample(const HolonomicPath& path, const RobotBody& robot, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("resample: spacing must be positive");
  HolonomicPath out;
  if (path.empty()) return out;
  out.waypoints.push_back(path.waypoints.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Configuration& a = path.waypoints[i - 1];
    const Configuration& b = path.waypoints[i];
    const int n = edge_steps(a, b, robot, spacing);
    for (int k = 1; k <= n; ++k) {
      out.waypoints.push_back(k == n ? b : Configuration::interpolate(a, b, static_cast<double>(k) / n));
    }
  }
  return out;
}

}  // namespace kat
