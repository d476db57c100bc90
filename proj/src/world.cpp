#include "kat/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kat {

RobotBody::RobotBody(const Vec3& half_extents) : half_extents_(half_extents) {
  if (!(half_extents.array() > 0.0).all()) {
    throw SceneError("robot half-extents must be positive");
  }
  // signed permutations with det +1 that map the extents onto themselves
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& perm : perms) {
    for (int signs = 0; signs < 8; ++signs) {
      Mat3 s = Mat3::Zero();
      for (int r = 0; r < 3; ++r) s(r, perm[r]) = (signs >> r) & 1 ? -1.0 : 1.0;
      if (s.determinant() < 0.0) continue;
      if (((s * half_extents_).cwiseAbs() - half_extents_).cwiseAbs().maxCoeff() > 1e-12) continue;
      symmetries_.push_back(Quat(s));
    }
  }
}

Quat RobotBody::nearest_equivalent_to_identity(const Quat& q) const {
  Quat best = q;
  double best_w = std::abs(q.w());
  for (const Quat& s : symmetries_) {
    const Quat cand = q * s;
    // larger |w| means a smaller rotation angle
    if (std::abs(cand.w()) > best_w + 1e-15) {
      best_w = std::abs(cand.w());
      best = cand;
    }
  }
  return canonical(best.normalized());
}

Obb RobotBody::at(const Configuration& c) const {
  return Obb{c.position(), c.rotation(), half_extents_};
}

Obb Obstacle::box() const {
  return Obb{center, orientation.normalized().toRotationMatrix(), half_extents};
}

bool Aabb::intersects(const Obb& box) const {
  const Vec3 c = 0.5 * (lo + hi);
  const Obb as_box{c, Mat3::Identity(), 0.5 * (hi - lo)};
  return obb_overlap(as_box, box);
}

Scene::Scene(const Aabb& bounds, std::vector<Obstacle> obstacles, const Configuration& start,
             const Configuration& goal, const GoalTolerance& tolerance)
    : bounds_(bounds),
      obstacles_(std::move(obstacles)),
      start_(start),
      goal_(goal),
      tolerance_(tolerance) {
  if (!(bounds_.hi.array() > bounds_.lo.array()).all()) {
    throw SceneError("workspace bounds must have positive extent");
  }
  boxes_.reserve(obstacles_.size());
  for (const auto& o : obstacles_) {
    if (!(o.half_extents.array() > 0.0).all()) {
      throw SceneError("obstacle half-extents must be positive");
    }
    boxes_.push_back(o.box());
  }
}

Scene Scene::with_endpoints(const Configuration& start, const Configuration& goal) const {
  return Scene(bounds_, obstacles_, start, goal, tolerance_);
}

void Scene::validate(const RobotBody& robot) const {
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (!bounds_.intersects(boxes_[i])) {
      std::ostringstream msg;
      msg << "obstacle " << i << " lies entirely outside the workspace bounds";
      throw SceneError(msg.str());
    }
  }
  if (is_collision(start_, *this, robot)) throw SceneError("start configuration is in collision");
  if (is_collision(goal_, *this, robot)) throw SceneError("goal configuration is in collision");
}

namespace {

bool outside_bounds(const Obb& body, const Aabb& bounds) {
  // extent of the box along each world axis
  const Vec3 reach = body.axes.cwiseAbs() * body.half;
  return ((body.center - reach).array() < bounds.lo.array()).any() ||
         ((body.center + reach).array() > bounds.hi.array()).any();
}

}  // namespace

bool is_collision(const Configuration& c, const Scene& scene, const RobotBody& robot) {
  const Obb body = robot.at(c);
  if (outside_bounds(body, scene.bounds())) return true;
  const double r_body = body.bounding_radius();
  for (const Obb& box : scene.boxes()) {
    const double reach = r_body + box.bounding_radius();
    if ((box.center - body.center).squaredNorm() > reach * reach) continue;
    if (obb_overlap(body, box)) return true;
  }
  return false;
}

int edge_steps(const Configuration& c1, const Configuration& c2, const RobotBody& robot,
               double resolution) {
  const double dp = (c2.position() - c1.position()).norm();
  const double sweep = rotation_angle(c1.orientation(), c2.orientation()) * robot.circumscribed_radius();
  return std::max(1, static_cast<int>(std::ceil(std::max(dp, sweep) / resolution)));
}

bool edge_is_free(const Configuration& c1, const Configuration& c2, const Scene& scene,
                  const RobotBody& robot, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("edge_is_free: resolution must be positive");
  const int n = edge_steps(c1, c2, robot, resolution);
  if (is_collision(c1, scene, robot) || is_collision(c2, scene, robot)) return false;
  // coarse-to-fine ordering finds blocked edges early; same point set as a sweep
  int stride = 1;
  while (stride < n) stride <<= 1;
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  seen[0] = seen[n] = true;
  for (; stride >= 1; stride >>= 1) {
    for (int i = stride; i < n; i += stride) {
      if (seen[i]) continue;
      seen[i] = true;
      const double t = static_cast<double>(i) / n;
      if (is_collision(Configuration::interpolate(c1, c2, t), scene, robot)) return false;
    }
  }
  return true;
}

double local_margin(const Configuration& c, const Scene& scene, const RobotBody& robot,
                    const Vec3& center, double radius) {
  if (is_collision(c, scene, robot)) return 0.0;
  const Obb body = robot.at(c);
  double best = std::numeric_limits<double>::infinity();
  for (const Obb& box : scene.boxes()) {
    if (box.distance_to_point(center) > radius) continue;
    // lower bound from bounding spheres lets far boxes skip GJK
    const double lower = (box.center - body.center).norm() - box.bounding_radius() - body.bounding_radius();
    if (lower >= best) continue;
    best = std::min(best, obb_distance(body, box));
  }
  return best;
}

double margin(const Configuration& c, const Scene& scene, const RobotBody& robot) {
  return local_margin(c, scene, robot, c.position(), std::numeric_limits<double>::infinity());
}

Quat wall_panel_orientation(const WallSpec& wall) {
  return wall.orientation.normalized() * Quat(Eigen::AngleAxisd(wall.tilt, Vec3::UnitX()));
}

std::vector<Obstacle> wall_with_hole(const WallSpec& wall) {
  const double half_w = wall.half_extents.y();
  const double half_h = wall.half_extents.z();
  const double thick = wall.half_extents.x();
  const double hu = wall.hole_center.x();
  const double hv = wall.hole_center.y();
  const double au = wall.hole_half_extents.x();
  const double av = wall.hole_half_extents.y();
  if (!(thick > 0.0 && half_w > 0.0 && half_h > 0.0 && au > 0.0 && av > 0.0)) {
    throw SceneError("wall and hole extents must be positive");
  }
  if (std::abs(hu) + au >= half_w || std::abs(hv) + av >= half_h) {
    throw SceneError("hole does not fit strictly inside the wall");
  }

  const Quat panel = wall_panel_orientation(wall);
  const Mat3 rot = panel.toRotationMatrix();
  // (u0, u1, v0, v1) in panel coordinates
  struct Piece { double u0, u1, v0, v1; };
  const Piece pieces[4] = {
      {-half_w, hu - au, -half_h, half_h},  // left
      {hu + au, half_w, -half_h, half_h},   // right
      {hu - au, hu + au, -half_h, hv - av}, // below
      {hu - au, hu + au, hv + av, half_h},  // above
  };
  std::vector<Obstacle> out;
  out.reserve(4);
  for (const Piece& p : pieces) {
    const Vec3 local(0.0, 0.5 * (p.u0 + p.u1), 0.5 * (p.v0 + p.v1));
    Obstacle o;
    o.center = wall.center + rot * local;
    o.half_extents = Vec3(thick, 0.5 * (p.u1 - p.u0), 0.5 * (p.v1 - p.v0));
    o.orientation = panel;
    out.push_back(o);
  }
  return out;
}

}  // namespace kat
