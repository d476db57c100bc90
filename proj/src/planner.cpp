#include "kat/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace kat {

std::vector<double> SpeedSchedule::values() const {
  validate();
  std::vector<double> out;
  // index-based so the entries are exact multiples, not accumulated sums
  for (int k = 0;; ++k) {
    const double v = v_min + k * v_step;
    if (v > v_max + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

void SpeedSchedule::validate() const {
  if (!(v_min > 0.0 && v_step > 0.0 && v_max >= v_min)) {
    throw std::invalid_argument("speed schedule needs 0 < v_min <= v_max and v_step > 0");
  }
}

std::string PlanFbResult::failure_summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    const auto& a = attempts[i];
    if (i) out << "; ";
    out << a.speed << " m/s: forward " << to_string(a.forward);
    if (a.backward) out << ", backward " << to_string(*a.backward);
  }
  return out.str();
}

PlanFbResult plan_fb(const Configuration& c_nar, const Vec3& dir, const Scene& scene,
                     const RobotBody& robot, const QuadParams& params, const ControllerGains& gains,
                     const HolonomicWeights& weights, const std::vector<double>& speeds,
                     const RolloutSettings& rollout_settings) {
  if (std::abs(dir.norm() - 1.0) > 1e-9) throw std::invalid_argument("plan_fb: direction must be a unit vector");
  PlanFbResult out;
  for (double v : speeds) {
    const State s_nar = State::from_configuration(c_nar, v * dir, Vec3::Zero());
    SpeedAttempt attempt;
    attempt.speed = v;
    RolloutResult fwd = rollout(s_nar, RolloutDirection::forward, scene, robot, params, gains, weights, rollout_settings);
    attempt.forward = fwd.failure;
    if (!fwd.success) {
      out.attempts.push_back(attempt);
      continue;
    }
    RolloutResult bwd = rollout(s_nar, RolloutDirection::backward, scene, robot, params, gains, weights, rollout_settings);
    attempt.backward = bwd.failure;
    out.attempts.push_back(attempt);
    if (!bwd.success) continue;

    LocalPassage& p = out.passage;
    p.trajectory.dt = rollout_settings.dt;
    p.trajectory.samples = std::move(bwd.trajectory.samples);
    p.narrow_index = p.trajectory.samples.size() - 1;
    p.trajectory.samples.insert(p.trajectory.samples.end(), fwd.trajectory.samples.begin() + 1,
                                fwd.trajectory.samples.end());
    p.trajectory.retime(0.0);
    p.escape_speed = v;
    out.success = true;
    return out;
  }
  return out;
}

std::size_t GlobalPlan::count(SegmentKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [&](const Segment& s) { return s.kind == kind; }));
}

std::vector<TrajectorySample> GlobalPlan::flatten() const {
  std::vector<TrajectorySample> out;
  for (const auto& seg : segments) {
    const auto& samples = seg.trajectory.samples;
    if (samples.empty()) continue;
    const double shift = out.empty() ? -samples.front().t : out.back().t - samples.front().t;
    for (std::size_t i = out.empty() ? 0 : 1; i < samples.size(); ++i) {
      out.push_back(samples[i]);
      out.back().t += shift;
    }
  }
  return out;
}

std::size_t GlobalPlan::sample_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) {
    if (!s.trajectory.empty()) n += n == 0 ? s.trajectory.size() : s.trajectory.size() - 1;
  }
  return n;
}

double GlobalPlan::max_speed() const {
  double best = 0.0;
  for (const auto& s : segments) best = std::max(best, s.trajectory.max_speed());
  return best;
}

namespace {

double quat_offset(const Quat& q) {
  return (canonical(q).coeffs() - Quat::Identity().coeffs()).norm();
}

// body-frame rotation vector carrying a to b
Vec3 relative_rotvec(const Quat& a, const Quat& b) {
  Quat d = canonical(a.conjugate() * b);
  const Eigen::AngleAxisd aa(d);
  return aa.angle() * aa.axis();
}

}  // namespace

StateTrajectory time_parameterize(const HolonomicPath& path, const QuadParams& params,
                                  const HolonomicWeights& weights, double v_slow, double accel,
                                  double dt) {
  if (path.empty()) throw std::invalid_argument("time_parameterize: empty path");
  if (!(v_slow > 0.0 && accel > 0.0 && dt > 0.0)) throw std::invalid_argument("time_parameterize: rates must be positive");
  const auto& w = path.waypoints;
  const Wrench hover{params.hover_thrust(), Vec3::Zero()};

  struct Piece {
    Vec3 dp;
    Vec3 rot;     // body rotation vector over the piece
    double cost;  // weighted length
  };
  std::vector<Piece> pieces;
  std::vector<std::size_t> starts;
  for (std::size_t i = 1; i < w.size(); ++i) {
    Piece p;
    p.dp = w[i].position() - w[i - 1].position();
    p.rot = relative_rotvec(w[i - 1].orientation(), w[i].orientation());
    p.cost = weights.w_v * p.dp.norm() + weights.w_omega * p.rot.norm();
    if (p.cost <= 0.0) continue;
    pieces.push_back(p);
    starts.push_back(i - 1);
  }

  StateTrajectory out;
  out.dt = dt;
  auto push = [&](const Configuration& c, const Vec3& v, const Vec3& omega) {
    TrajectorySample s;
    s.t = static_cast<double>(out.samples.size()) * dt;
    s.state = State::from_configuration(c, v, omega);
    s.wrench = hover;
    out.samples.push_back(s);
  };
  if (pieces.empty()) {
    push(w.front(), Vec3::Zero(), Vec3::Zero());
    return out;
  }

  double remaining = 0.0;
  for (const auto& p : pieces) remaining += p.cost;
  const double rate_slow = weights.w_v * v_slow;
  std::size_t k = 0;   // current piece
  double f = 0.0;      // fraction within piece
  double rate = 0.0;   // weighted speed at the previous sample
  const long max_samples = 50000000;

  for (long n = 0;; ++n) {
    if (n > max_samples) throw PlanningError("connect", "connector time parameterization did not terminate");
    const Configuration& a = w[starts[k]];
    const Configuration& b = w[starts[k] + 1];
    const Configuration c = f <= 0.0 ? a : Configuration::interpolate(a, b, f);
    const double cap_pose = 0.5 * (weights.epsilon - weights.w_r * quat_offset(c.orientation()));
    double r = std::min({rate + accel * dt, rate_slow, std::sqrt(2.0 * accel * remaining), std::max(cap_pose, 0.0)});
    if (n == 0) r = 0.0;
    const Piece& pc = pieces[k];
    const double s_dot = r / pc.cost;
    push(c, pc.dp * s_dot, pc.rot * s_dot);
    rate = r;

    double advance = std::max(r, 1e-6 * rate_slow) * dt;
    if (advance >= remaining - 1e-12) break;
    remaining -= advance;
    while (advance > 0.0) {
      const double left = (1.0 - f) * pieces[k].cost;
      if (advance < left) {
        f += advance / pieces[k].cost;
        advance = 0.0;
      } else {
        advance -= left;
        f = 0.0;
        if (k + 1 < pieces.size()) ++k;
        else advance = 0.0;
      }
    }
  }
  push(w.back(), Vec3::Zero(), Vec3::Zero());
  return out;
}

StateTrajectory plan_connector(const Configuration& from, const Configuration& to, const Scene& scene,
                               const RobotBody& robot, const QuadParams& params,
                               const HolonomicWeights& weights, const ConnectorSettings& settings,
                               std::uint64_t seed, double budget_s) {
  const double v_slow = settings.v_slow > 0.0 ? settings.v_slow : 0.5 * weights.epsilon / weights.w_v;
  const double res = settings.rrt.edge_resolution;
  const Configuration from_level(from.position(), Quat::Identity());
  const Configuration to_level(to.position(), Quat::Identity());
  // Edge checks only see poses res apart, while the trajectory is sampled much
  // more densely. Padding the body by res/2 covers every pose in between.
  const RobotBody padded(robot.half_extents() + Vec3::Constant(0.5 * res));
  auto free_edge = [&](const Configuration& a, const Configuration& b) {
    const bool ends_clear = !is_collision(a, scene, padded) && !is_collision(b, scene, padded);
    return edge_is_free(a, b, scene, ends_clear ? padded : robot, res);
  };
  if (!free_edge(from, from_level)) {
    throw PlanningError("connect", "cannot level the robot at the connector start");
  }
  if (!free_edge(to_level, to)) {
    throw PlanningError("connect", "cannot turn the robot to the connector target orientation");
  }

  HolonomicPath path;
  auto append = [&](const Configuration& c) {
    if (path.waypoints.empty() || !(path.waypoints.back() == c)) path.waypoints.push_back(c);
  };
  append(from);
  if (free_edge(from_level, to_level)) {
    append(from_level);
    append(to_level);
  } else {
    RrtParams rp = settings.rrt;
    rp.fixed_orientation = true;
    const Scene sub = scene.with_endpoints(from_level, to_level);
    const bool ends_clear = !is_collision(from_level, scene, padded) && !is_collision(to_level, scene, padded);
    const RobotBody& body = ends_clear ? padded : robot;
    const RrtResult rrt = plan_rrt(sub, body, seed, budget_s, rp, RrtVariant::whitelist);
    if (!rrt.success) throw PlanningError("connect", "connector search exhausted its budget");
    const HolonomicPath smoothed = smooth(rrt.path, sub, body, settings.smooth_iterations, derive_seed(seed, 7), res);
    for (const auto& c : smoothed.waypoints) append(c);
  }
  append(to);
  StateTrajectory out = time_parameterize(path, params, weights, v_slow, settings.accel, settings.dt);
  for (const auto& s : out.samples) {
    if (is_collision(s.state.configuration(), scene, robot)) {
      throw PlanningError("connect", "connector clips an obstacle between edge checks");
    }
  }
  return out;
}

GlobalPlan connect_global(const std::vector<LocalPassage>& passages, const Scene& scene,
                          const RobotBody& robot, const QuadParams& params,
                          const HolonomicWeights& weights, const ConnectorSettings& settings,
                          std::uint64_t seed, double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  auto left = [&] {
    return budget_s - std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  GlobalPlan plan;
  Configuration from = scene.start();
  for (std::size_t i = 0; i <= passages.size(); ++i) {
    const Configuration to = i < passages.size() ? passages[i].trajectory.front().configuration() : scene.goal();
    Segment conn;
    try {
      conn.trajectory = plan_connector(from, to, scene, robot, params, weights, settings, derive_seed(seed, 5, i), left());
    } catch (const PlanningError& e) {
      std::ostringstream msg;
      msg << "gap " << i << ": " << e.what();
      throw PlanningError("connect", msg.str());
    }
    plan.segments.push_back(std::move(conn));
    if (i == passages.size()) break;
    Segment pass;
    pass.kind = SegmentKind::passage;
    pass.trajectory = passages[i].trajectory;
    pass.narrow_index = passages[i].narrow_index;
    pass.escape_speed = passages[i].escape_speed;
    plan.segments.push_back(std::move(pass));
    from = passages[i].trajectory.back().configuration();
  }
  return plan;
}

void Problem::validate() const {
  scene.validate(robot);
  quad.validate();
  gains.validate();
  weights.validate();
  planner.rrt.validate();
  planner.margin.validate();
  planner.escape.validate();
  planner.speeds.validate();
  if (!(planner.narrow_h > 0.0)) throw std::invalid_argument("narrow h must be positive");
  if (!(planner.link_radius > 0.0)) throw std::invalid_argument("link radius must be positive");
  if (planner.fb_attempts < 1) throw std::invalid_argument("fb_attempts must be at least 1");
  if (!(planner.rollout.dt > 0.0 && planner.rollout.dt <= 0.01)) throw std::invalid_argument("rollout dt must lie in (0, 0.01] s");
  if (!(planner.rollout.t_max > 0.0)) throw std::invalid_argument("rollout t_max must be positive");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage, std::uint64_t index) {
  // splitmix64 finalizer over the mixed inputs
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stage + 1) + 0xbf58476d1ce4e5b9ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

KatResult kat(const Problem& problem, std::uint64_t seed, double budget_s) {
  problem.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  auto check_budget = [&](const char* after) {
    if (elapsed() > budget_s) throw PlanningError("budget", std::string("budget exhausted after ") + after);
  };

  const Scene& scene = problem.scene;
  const RobotBody& robot = problem.robot;
  const PlannerSettings& ps = problem.planner;
  KatResult out;
  PlanReport& report = out.report;
  report.seed = seed;

  try {
    const RrtResult rrt = plan_rrt(scene, robot, derive_seed(seed, 1), budget_s, ps.rrt, ps.variant);
    report.sampled_nodes = rrt.sampled_nodes;
    report.tree_size = rrt.tree_size;
    if (!rrt.success) throw PlanningError("rrt", "holonomic search found no path within the budget");
    out.holonomic_path = smooth(rrt.path, scene, robot, ps.smooth_iterations, derive_seed(seed, 2), ps.rrt.edge_resolution);
    report.path_length = path_length(out.holonomic_path);
    check_budget("holonomic search");

    std::vector<Configuration> points = narrow_points(out.holonomic_path, scene, robot, ps.narrow_h);
    for (auto& c : points) c = Configuration(c.position(), robot.nearest_equivalent_to_identity(c.orientation()));
    report.narrow_points = points.size();
    const auto groups = cluster_members(points, ps.link_radius);
    const std::vector<Configuration> centers = cluster_centroids(points, ps.link_radius);
    report.clusters = centers.size();
    const HolonomicPath dense = resample(out.holonomic_path, robot, ps.narrow_h);
    const std::vector<double> speeds = ps.speeds.values();
    const double span = ps.tangent_span > 0.0 ? ps.tangent_span : 2.0 * robot.circumscribed_radius();

    for (std::size_t i = 0; i < centers.size(); ++i) {
      NarrowCluster cluster;
      cluster.center = centers[i];
      cluster.tangent = path_tangent(dense, centers[i], span);
      for (std::size_t m : groups[i]) cluster.members.push_back(points[m]);

      bool done = false;
      int attempt = 0;
      for (; attempt < ps.fb_attempts && !done; ++attempt) {
        std::mt19937_64 rng(derive_seed(seed, 3, i * 64 + static_cast<std::uint64_t>(attempt)));
        std::ostringstream tag;
        tag << "passage " << i << " attempt " << attempt + 1 << ": ";
        try {
          const MarginSample ms = max_margin_sample(cluster.center, cluster.tangent, scene, robot, ps.margin, rng);
          const EscapeDirection esc = escape_direction(ms.config, cluster.tangent, scene, robot, ps.escape, rng);
          PlanFbResult fb = plan_fb(ms.config, esc.dir, scene, robot, problem.quad, problem.gains,
                                    problem.weights, speeds, ps.rollout);
          if (fb.success) {
            cluster.refined = ms.config;
            out.escape_dirs.push_back(esc.dir);
            report.escape_speeds.push_back(fb.passage.escape_speed);
            out.passages.push_back(std::move(fb.passage));
            done = true;
          } else {
            report.fb_failures.push_back(tag.str() + fb.failure_summary());
          }
        } catch (const NarrowError& e) {
          report.fb_failures.push_back(tag.str() + e.what());
        } catch (const EscapeError& e) {
          report.fb_failures.push_back(tag.str() + e.what());
        }
        check_budget("local passage planning");
      }
      report.fb_attempts_used.push_back(attempt);
      out.clusters.push_back(cluster);
      if (!done) {
        std::ostringstream msg;
        msg << "passage " << i << " failed after " << attempt << " attempts";
        throw PlanningError("plan_fb", msg.str());
      }
    }

    out.plan = connect_global(out.passages, scene, robot, problem.quad, problem.weights, ps.connector,
                              derive_seed(seed, 4), budget_s - elapsed());
    check_budget("connectors");
    report.success = true;
    report.max_speed = out.plan.max_speed();
    report.samples = out.plan.sample_count();
  } catch (const PlanningError& e) {
    report.success = false;
    report.failure_stage = e.stage();
    report.failure_detail = e.what();
  }
  report.wall_time = elapsed();
  return out;
}

}  // namespace kat
