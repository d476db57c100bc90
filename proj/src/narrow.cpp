#include "kat/narrow.hpp"

#include "kat/batch.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace kat {

int colliding_probes(const Configuration& c, const Scene& scene, const RobotBody& robot, double h) {
  int count = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      if (is_collision(c.translated(sign * h * Vec3::Unit(axis)), scene, robot)) ++count;
    }
  }
  return count;
}

std::vector<Configuration> narrow_points(const HolonomicPath& path, const Scene& scene,
                                         const RobotBody& robot, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("narrow_points: h must be positive");
  const HolonomicPath dense = resample(path, robot, h);
  std::vector<Configuration> probes;
  probes.reserve(dense.size() * 6);
  for (const Configuration& c : dense.waypoints) {
    for (int axis = 0; axis < 3; ++axis) {
      probes.push_back(c.translated(h * Vec3::Unit(axis)));
      probes.push_back(c.translated(-h * Vec3::Unit(axis)));
    }
  }
  const std::vector<char> hit = collision_flags(probes, scene, robot);
  std::vector<Configuration> out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const int count = std::accumulate(hit.begin() + static_cast<std::ptrdiff_t>(6 * i),
                                      hit.begin() + static_cast<std::ptrdiff_t>(6 * i + 6), 0);
    if (count >= 4) out.push_back(dense.waypoints[i]);
  }
  return out;
}

Quat chordal_mean(const std::vector<Quat>& qs) {
  if (qs.empty()) throw std::invalid_argument("chordal_mean: empty input");
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (const Quat& q : qs) {
    const Eigen::Vector4d v = q.normalized().coeffs();
    m += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m);
  const Eigen::Vector4d top = eig.eigenvectors().col(3);
  Quat out;
  out.coeffs() = top;
  return canonical(out.normalized());
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> cluster_members(const std::vector<Configuration>& points,
                                                      double link_radius) {
  const std::size_t n = points.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((points[i].position() - points[j].position()).norm() <= link_radius) sets.unite(i, j);
    }
  }
  // roots are the smallest member index, so iterating i in order yields
  // clusters ordered by earliest member
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = sets.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

std::vector<Configuration> cluster_centroids(const std::vector<Configuration>& points,
                                             double link_radius) {
  std::vector<Configuration> out;
  for (const auto& members : cluster_members(points, link_radius)) {
    Vec3 mean = Vec3::Zero();
    std::vector<Quat> qs;
    for (std::size_t i : members) {
      mean += points[i].position();
      qs.push_back(points[i].orientation());
    }
    mean /= static_cast<double>(members.size());
    out.emplace_back(mean, chordal_mean(qs));
  }
  return out;
}

namespace {

// Point at arc length `span` from waypoint i, walking in direction `step`
// (+1 or -1); clamps at the path ends.
Vec3 walk(const std::vector<Configuration>& w, std::size_t i, int step, double span) {
  Vec3 at = w[i].position();
  double left = span;
  for (std::size_t j = i; left > 0.0;) {
    if ((step < 0 && j == 0) || (step > 0 && j + 1 == w.size())) break;
    const std::size_t k = step > 0 ? j + 1 : j - 1;
    const Vec3 seg = w[k].position() - w[j].position();
    const double len = seg.norm();
    if (len >= left) return at + seg * (left / len);
    at = w[k].position();
    left -= len;
    j = k;
  }
  return at;
}

}  // namespace

Vec3 path_tangent(const HolonomicPath& path, const Configuration& center, double span) {
  const auto& w = path.waypoints;
  if (w.size() < 2) throw std::invalid_argument("path_tangent: need at least two waypoints");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = (w[i].position() - center.position()).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (span > 0.0) {
    const Vec3 d = walk(w, best, +1, span) - walk(w, best, -1, span);
    if (d.norm() > 1e-12) return d.normalized();
  }
  // widen the stencil until it spans a nonzero displacement
  for (std::size_t k = 1; k < w.size(); ++k) {
    const std::size_t lo = best >= k ? best - k : 0;
    const std::size_t hi = std::min(best + k, w.size() - 1);
    const Vec3 d = w[hi].position() - w[lo].position();
    if (d.norm() > 1e-12) return d.normalized();
  }
  throw std::invalid_argument("path_tangent: path has no positional extent");
}

void MarginSettings::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("margin rho must be positive");
  if (n_samples < 1) throw std::invalid_argument("margin sample count must be at least 1");
  if (!(delta > 0.0)) throw std::invalid_argument("margin delta must be positive");
  if (!(theta_max >= 0.0 && theta_max < std::numbers::pi)) throw std::invalid_argument("theta_max must lie in [0, pi)");
}

namespace {

// Pose parameterized by in-plane offsets and a body-frame rotation vector
// relative to the center.
struct PlanePose {
  double a = 0.0;
  double b = 0.0;
  Vec3 r = Vec3::Zero();
};

Quat rotvec_quat(const Vec3& r) {
  const double angle = r.norm();
  if (angle < 1e-300) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, r / angle));
}

Eigen::Matrix<double, 7, 1> pose_vector(const Configuration& c) {
  Eigen::Matrix<double, 7, 1> v;
  v << c.position(), c.orientation().w(), c.orientation().vec();
  return v;
}

}  // namespace

MarginSample max_margin_sample(const Configuration& center, const Vec3& tangent, const Scene& scene,
                               const RobotBody& robot, const MarginSettings& settings,
                               std::mt19937_64& rng) {
  settings.validate();
  const auto [e1, e2] = plane_basis(tangent);
  auto make = [&](const PlanePose& p) {
    return Configuration(center.position() + p.a * e1 + p.b * e2,
                         center.orientation() * rotvec_quat(p.r));
  };

  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PlanePose> poses{PlanePose{}};
  poses.reserve(static_cast<std::size_t>(settings.n_samples) + 1);
  for (int i = 0; i < settings.n_samples; ++i) {
    PlanePose p;
    const double r = settings.rho * std::sqrt(u(rng));
    const double phi = 2.0 * std::numbers::pi * u(rng);
    p.a = r * std::cos(phi);
    p.b = r * std::sin(phi);
    p.r = random_unit_vector(rng) * (settings.theta_max * u(rng));
    poses.push_back(p);
  }
  std::vector<Configuration> configs;
  configs.reserve(poses.size());
  for (const auto& p : poses) configs.push_back(make(p));

  const Vec3 c0 = center.position();
  const std::vector<char> hit = collision_flags(configs, scene, robot);
  std::vector<double> score(configs.size(), -std::numeric_limits<double>::infinity());
  if (settings.objective == MarginObjective::clearance) {
    const std::vector<double> m = local_margins(configs, scene, robot, c0, settings.delta);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      if (!hit[i]) score[i] = m[i];
    }
  } else {
    std::vector<Eigen::Matrix<double, 7, 1>> colliding;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      if (hit[i] && (configs[i].position() - c0).norm() <= settings.delta) colliding.push_back(pose_vector(configs[i]));
    }
    for (std::size_t i = 0; i < configs.size(); ++i) {
      if (hit[i]) continue;
      const auto x = pose_vector(configs[i]);
      double sum = 0.0;
      for (const auto& y : colliding) sum += (x - y).squaredNorm();
      score[i] = -sum;
    }
  }

  MarginSample out;
  std::size_t best = configs.size();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (hit[i]) continue;
    ++out.free_samples;
    if (best == configs.size() || score[i] > score[best]) best = i;
  }
  if (best == configs.size()) throw NarrowError("max_margin_sample: no collision-free sample in the disk");

  PlanePose pose = poses[best];
  double value = score[best];
  if (settings.refine && settings.objective == MarginObjective::clearance && std::isfinite(value)) {
    auto eval = [&](const PlanePose& p) {
      if (p.a * p.a + p.b * p.b > settings.rho * settings.rho) return -1.0;
      if (p.r.norm() > settings.theta_max) return -1.0;
      return local_margin(make(p), scene, robot, c0, settings.delta);
    };
    double step_pos = 0.25 * settings.rho;
    double step_rot = 0.25 * settings.theta_max;
    const double min_pos = 1e-4;
    for (int sweep = 0; sweep < 400 && step_pos >= min_pos; ++sweep) {
      bool moved = false;
      for (int dim = 0; dim < 5; ++dim) {
        if (dim >= 2 && step_rot <= 0.0) break;
        for (double sign : {1.0, -1.0}) {
          PlanePose trial = pose;
          if (dim == 0) trial.a += sign * step_pos;
          else if (dim == 1) trial.b += sign * step_pos;
          else trial.r[dim - 2] += sign * step_rot;
          const double v = eval(trial);
          if (v > value) {
            value = v;
            pose = trial;
            moved = true;
          }
        }
      }
      if (!moved) {
        step_pos *= 0.5;
        step_rot *= 0.5;
      }
    }
  }

  out.config = make(pose);
  out.score = value;
  out.clearance = local_margin(out.config, scene, robot, c0, settings.delta);
  return out;
}

}  // namespace kat
