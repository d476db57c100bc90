#include "kat/scene_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace kat {

Quat from_rpy(double roll, double pitch, double yaw) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& why) const {
    std::ostringstream msg;
    msg << origin_;
    if (node.IsDefined() && node.Mark().line >= 0) msg << ":" << node.Mark().line + 1;
    msg << ": " << field << ": " << why;
    throw SceneError(msg.str());
  }

  void only_keys(const YAML::Node& map, const std::string& field, std::initializer_list<const char*> keys) const {
    if (!map.IsMap()) fail(map, field, "expected a mapping");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, field == "scene" ? key : field + "." + key, "unknown key");
    }
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsDefined()) fail(node, field, "missing");
    if (!node.IsScalar()) fail(node, field, "expected a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v) || !std::isfinite(v)) fail(node, field, "expected a finite number");
    return v;
  }

  double number_or(const YAML::Node& map, const char* key, const std::string& field, double fallback) const {
    const YAML::Node n = map[key];
    return n.IsDefined() ? number(n, field + "." + key) : fallback;
  }

  long integer_or(const YAML::Node& map, const char* key, const std::string& field, long fallback) const {
    const YAML::Node n = map[key];
    if (!n.IsDefined()) return fallback;
    const double v = number(n, field + "." + key);
    if (v != std::floor(v)) fail(n, field + "." + key, "expected an integer");
    return static_cast<long>(v);
  }

  bool boolean_or(const YAML::Node& map, const char* key, const std::string& field, bool fallback) const {
    const YAML::Node n = map[key];
    if (!n.IsDefined()) return fallback;
    bool v = false;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v)) fail(n, field + "." + key, "expected true or false");
    return v;
  }

  std::string text_or(const YAML::Node& map, const char* key, const std::string& field, const std::string& fallback) const {
    const YAML::Node n = map[key];
    if (!n.IsDefined()) return fallback;
    if (!n.IsScalar()) fail(n, field + "." + key, "expected a string");
    return n.as<std::string>();
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const YAML::Node& node, const std::string& field) const {
    if (!node.IsDefined()) fail(node, field, "missing");
    if (!node.IsSequence() || node.size() != N) {
      fail(node, field, "expected a list of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) out[i] = number(node[i], field + "[" + std::to_string(i) + "]");
    return out;
  }

  Quat rpy_or_identity(const YAML::Node& map, const std::string& field) const {
    const YAML::Node n = map["rpy_deg"];
    if (!n.IsDefined()) return Quat::Identity();
    const Vec3 a = vec<3>(n, field + ".rpy_deg") * kDeg;
    return from_rpy(a.x(), a.y(), a.z());
  }

  Configuration pose(const YAML::Node& map, const std::string& field) const {
    if (!map.IsDefined()) fail(map, field, "missing");
    only_keys(map, field, {"position", "rpy_deg"});
    return Configuration(vec<3>(map["position"], field + ".position"), rpy_or_identity(map, field));
  }

  Vec3 positive3(const YAML::Node& node, const std::string& field) const {
    const Vec3 v = vec<3>(node, field);
    if (!(v.array() > 0.0).all()) fail(node, field, "entries must be positive");
    return v;
  }

 private:
  std::string origin_;
};

}  // namespace

SceneFile parse_scene(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    std::ostringstream msg;
    msg << origin << ":" << e.mark.line + 1 << ": malformed document: " << e.msg;
    throw SceneError(msg.str());
  }
  const Reader rd(origin);
  rd.only_keys(root, "scene", {"bounds", "robot", "walls", "obstacles", "start", "goal", "goal_tolerance", "quad",
                               "gains", "holonomic", "rrt", "narrow", "escape", "planner"});

  SceneFile f;
  Problem& pr = f.problem;

  const YAML::Node b = root["bounds"];
  if (!b.IsDefined()) rd.fail(root, "bounds", "missing");
  rd.only_keys(b, "bounds", {"lo", "hi"});
  f.bounds.lo = rd.vec<3>(b["lo"], "bounds.lo");
  f.bounds.hi = rd.vec<3>(b["hi"], "bounds.hi");
  if (!(f.bounds.hi.array() > f.bounds.lo.array()).all()) rd.fail(b, "bounds", "hi must exceed lo on every axis");

  const YAML::Node rb = root["robot"];
  if (!rb.IsDefined()) rd.fail(root, "robot", "missing");
  rd.only_keys(rb, "robot", {"half_extents"});
  pr.robot = RobotBody(rd.positive3(rb["half_extents"], "robot.half_extents"));

  if (const YAML::Node walls = root["walls"]; walls.IsDefined()) {
    if (!walls.IsSequence()) rd.fail(walls, "walls", "expected a list");
    for (std::size_t i = 0; i < walls.size(); ++i) {
      const YAML::Node w = walls[i];
      const std::string field = "walls[" + std::to_string(i) + "]";
      rd.only_keys(w, field, {"center", "rpy_deg", "half_extents", "hole", "tilt_deg"});
      WallSpec spec;
      spec.center = rd.vec<3>(w["center"], field + ".center");
      spec.orientation = rd.rpy_or_identity(w, field);
      if (w["half_extents"].IsDefined()) spec.half_extents = rd.positive3(w["half_extents"], field + ".half_extents");
      if (const YAML::Node h = w["hole"]; h.IsDefined()) {
        rd.only_keys(h, field + ".hole", {"center", "half_extents"});
        if (h["center"].IsDefined()) spec.hole_center = rd.vec<2>(h["center"], field + ".hole.center");
        if (h["half_extents"].IsDefined()) {
          spec.hole_half_extents = rd.vec<2>(h["half_extents"], field + ".hole.half_extents");
          if (!(spec.hole_half_extents.array() > 0.0).all()) rd.fail(h["half_extents"], field + ".hole.half_extents", "entries must be positive");
        }
      }
      spec.tilt = rd.number_or(w, "tilt_deg", field, 0.0) * kDeg;
      try {
        wall_with_hole(spec);
      } catch (const SceneError& e) {
        rd.fail(w, field, e.what());
      }
      f.walls.push_back(spec);
    }
  }

  if (const YAML::Node obs = root["obstacles"]; obs.IsDefined()) {
    if (!obs.IsSequence()) rd.fail(obs, "obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string field = "obstacles[" + std::to_string(i) + "]";
      rd.only_keys(obs[i], field, {"center", "half_extents", "rpy_deg"});
      Obstacle o;
      o.center = rd.vec<3>(obs[i]["center"], field + ".center");
      o.half_extents = rd.positive3(obs[i]["half_extents"], field + ".half_extents");
      o.orientation = rd.rpy_or_identity(obs[i], field);
      f.boxes.push_back(o);
    }
  }

  f.start = rd.pose(root["start"], "start");
  f.goal = rd.pose(root["goal"], "goal");
  if (const YAML::Node t = root["goal_tolerance"]; t.IsDefined()) {
    rd.only_keys(t, "goal_tolerance", {"position", "angle_deg"});
    f.tolerance.position = rd.number_or(t, "position", "goal_tolerance", f.tolerance.position);
    f.tolerance.angle = rd.number_or(t, "angle_deg", "goal_tolerance", f.tolerance.angle / kDeg) * kDeg;
  }

  if (const YAML::Node q = root["quad"]; q.IsDefined()) {
    rd.only_keys(q, "quad", {"m", "J", "d", "c", "g", "f_rotor_max"});
    QuadParams& qp = pr.quad;
    qp.m = rd.number_or(q, "m", "quad", qp.m);
    if (q["J"].IsDefined()) qp.J = rd.positive3(q["J"], "quad.J").asDiagonal();
    qp.d = rd.number_or(q, "d", "quad", qp.d);
    qp.c = rd.number_or(q, "c", "quad", qp.c);
    qp.g = rd.number_or(q, "g", "quad", qp.g);
    qp.f_rotor_max = rd.number_or(q, "f_rotor_max", "quad", qp.f_rotor_max);
  }

  if (const YAML::Node g = root["gains"]; g.IsDefined()) {
    rd.only_keys(g, "gains", {"k_omega", "k_zv", "k_z", "k_v", "max_tilt_deg", "law"});
    ControllerGains& k = pr.gains;
    k.k_omega = rd.number_or(g, "k_omega", "gains", k.k_omega);
    k.k_zv = rd.number_or(g, "k_zv", "gains", k.k_zv);
    k.k_z = rd.number_or(g, "k_z", "gains", k.k_z);
    k.k_v = rd.number_or(g, "k_v", "gains", k.k_v);
    k.max_tilt = rd.number_or(g, "max_tilt_deg", "gains", k.max_tilt / kDeg) * kDeg;
    const std::string law = rd.text_or(g, "law", "gains", "geometric");
    if (law == "geometric") k.law = ControlLaw::geometric;
    else if (law == "printed") k.law = ControlLaw::printed;
    else rd.fail(g["law"], "gains.law", "expected geometric or printed");
  }

  if (const YAML::Node h = root["holonomic"]; h.IsDefined()) {
    rd.only_keys(h, "holonomic", {"w_v", "w_omega", "w_r", "epsilon"});
    HolonomicWeights& w = pr.weights;
    w.w_v = rd.number_or(h, "w_v", "holonomic", w.w_v);
    w.w_omega = rd.number_or(h, "w_omega", "holonomic", w.w_omega);
    w.w_r = rd.number_or(h, "w_r", "holonomic", w.w_r);
    w.epsilon = rd.number_or(h, "epsilon", "holonomic", w.epsilon);
  }

  PlannerSettings& ps = pr.planner;
  const double r_circ = pr.robot.circumscribed_radius();
  const double thickness = f.walls.empty() ? 0.0 : 2.0 * f.walls.front().half_extents.x();
  double hole_diag = 0.0;
  for (const auto& w : f.walls) hole_diag = std::max(hole_diag, w.hole_half_extents.norm());

  if (const YAML::Node r = root["rrt"]; r.IsDefined()) {
    rd.only_keys(r, "rrt", {"goal_bias", "step", "rho_rot", "edge_resolution", "max_nodes", "smooth_iterations"});
    ps.rrt.goal_bias = rd.number_or(r, "goal_bias", "rrt", ps.rrt.goal_bias);
    ps.rrt.step = rd.number_or(r, "step", "rrt", ps.rrt.step);
    ps.rrt.rho_rot = rd.number_or(r, "rho_rot", "rrt", ps.rrt.rho_rot);
    ps.rrt.edge_resolution = rd.number_or(r, "edge_resolution", "rrt", ps.rrt.edge_resolution);
    ps.rrt.max_nodes = static_cast<std::size_t>(rd.integer_or(r, "max_nodes", "rrt", static_cast<long>(ps.rrt.max_nodes)));
    ps.smooth_iterations = static_cast<int>(rd.integer_or(r, "smooth_iterations", "rrt", ps.smooth_iterations));
  }
  ps.connector.rrt.edge_resolution = ps.rrt.edge_resolution;
  ps.connector.rrt.step = ps.rrt.step;
  ps.connector.smooth_iterations = ps.smooth_iterations;

  // environment-scaled defaults
  ps.margin.delta = 4.0 * r_circ;
  ps.margin.rho = hole_diag > 0.0 ? hole_diag : r_circ;
  ps.escape.mu = thickness + 2.0 * r_circ;
  ps.escape.sigma = ps.escape.mu / 3.0;

  if (const YAML::Node n = root["narrow"]; n.IsDefined()) {
    rd.only_keys(n, "narrow", {"h", "link_radius", "tangent_span", "rho", "delta", "samples", "theta_max_deg", "objective", "refine"});
    ps.narrow_h = rd.number_or(n, "h", "narrow", ps.narrow_h);
    ps.tangent_span = rd.number_or(n, "tangent_span", "narrow", ps.tangent_span);
    ps.margin.rho = rd.number_or(n, "rho", "narrow", ps.margin.rho);
    ps.margin.delta = rd.number_or(n, "delta", "narrow", ps.margin.delta);
    ps.margin.n_samples = static_cast<int>(rd.integer_or(n, "samples", "narrow", ps.margin.n_samples));
    ps.margin.theta_max = rd.number_or(n, "theta_max_deg", "narrow", ps.margin.theta_max / kDeg) * kDeg;
    ps.margin.refine = rd.boolean_or(n, "refine", "narrow", ps.margin.refine);
    const std::string obj = rd.text_or(n, "objective", "narrow", "clearance");
    if (obj == "clearance") ps.margin.objective = MarginObjective::clearance;
    else if (obj == "summed_sq") ps.margin.objective = MarginObjective::summed_sq;
    else rd.fail(n["objective"], "narrow.objective", "expected clearance or summed_sq");
  }
  ps.link_radius = std::max(2.0 * thickness, ps.narrow_h);
  if (const YAML::Node n = root["narrow"]; n.IsDefined()) {
    ps.link_radius = rd.number_or(n, "link_radius", "narrow", ps.link_radius);
  }

  if (const YAML::Node e = root["escape"]; e.IsDefined()) {
    rd.only_keys(e, "escape", {"n", "mu", "sigma"});
    ps.escape.n = static_cast<int>(rd.integer_or(e, "n", "escape", ps.escape.n));
    ps.escape.mu = rd.number_or(e, "mu", "escape", ps.escape.mu);
    ps.escape.sigma = rd.number_or(e, "sigma", "escape", ps.escape.mu / 3.0);
  }

  if (const YAML::Node p = root["planner"]; p.IsDefined()) {
    rd.only_keys(p, "planner", {"dt", "t_max", "edge_resolution", "speed_min", "speed_step", "speed_max",
                                "fb_attempts", "v_slow", "connector_dt", "connector_accel"});
    ps.rollout.dt = rd.number_or(p, "dt", "planner", ps.rollout.dt);
    ps.rollout.t_max = rd.number_or(p, "t_max", "planner", ps.rollout.t_max);
    ps.rollout.edge_resolution = rd.number_or(p, "edge_resolution", "planner", ps.rollout.edge_resolution);
    ps.speeds.v_min = rd.number_or(p, "speed_min", "planner", ps.speeds.v_min);
    ps.speeds.v_step = rd.number_or(p, "speed_step", "planner", ps.speeds.v_step);
    ps.speeds.v_max = rd.number_or(p, "speed_max", "planner", ps.speeds.v_max);
    ps.fb_attempts = static_cast<int>(rd.integer_or(p, "fb_attempts", "planner", ps.fb_attempts));
    ps.connector.v_slow = rd.number_or(p, "v_slow", "planner", ps.connector.v_slow);
    ps.connector.dt = rd.number_or(p, "connector_dt", "planner", ps.connector.dt);
    ps.connector.accel = rd.number_or(p, "connector_accel", "planner", ps.connector.accel);
  }

  std::vector<Obstacle> obstacles = f.boxes;
  for (const auto& w : f.walls) {
    const auto pieces = wall_with_hole(w);
    obstacles.insert(obstacles.end(), pieces.begin(), pieces.end());
  }
  pr.scene = Scene(f.bounds, std::move(obstacles), f.start, f.goal, f.tolerance);
  try {
    pr.validate();
  } catch (const std::invalid_argument& e) {
    throw SceneError(origin + ": " + e.what());
  } catch (const SceneError& e) {
    throw SceneError(origin + ": " + e.what());
  }
  return f;
}

SceneFile load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scene(text.str(), path);
}

Problem with_wall_tilt(const SceneFile& file, double tilt_rad) {
  Problem p = file.problem;
  std::vector<Obstacle> obstacles = file.boxes;
  for (WallSpec w : file.walls) {
    w.tilt = tilt_rad;
    const auto pieces = wall_with_hole(w);
    obstacles.insert(obstacles.end(), pieces.begin(), pieces.end());
  }
  p.scene = Scene(file.bounds, std::move(obstacles), file.start, file.goal, file.tolerance);
  return p;
}

}  // namespace kat
