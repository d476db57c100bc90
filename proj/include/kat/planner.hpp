#pragma once

#include "kat/escape.hpp"
#include "kat/narrow.hpp"
#include "kat/rollout.hpp"
#include "kat/rrt.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kat {

/// Increasing escape-speed candidates v_min, v_min + step, ... <= v_max.
struct SpeedSchedule {
  double v_min = 0.5;
  double v_step = 0.5;
  double v_max = 20.0;

  std::vector<double> values() const;
  void validate() const;
};

struct LocalPassage {
  StateTrajectory trajectory;
  std::size_t narrow_index = 0;
  double escape_speed = 0.0;
};

struct SpeedAttempt {
  double speed = 0.0;
  RolloutFailure forward = RolloutFailure::none;
  /// Empty when the forward rollout already failed and backward was skipped.
  std::optional<RolloutFailure> backward;
};

struct PlanFbResult {
  bool success = false;
  LocalPassage passage;
  std::vector<SpeedAttempt> attempts;

  std::string failure_summary() const;
};

/// Tries each scheduled speed along `dir` from the narrow configuration and
/// returns the first one for which both rollouts reach the near-holonomic set.
PlanFbResult plan_fb(const Configuration& c_nar, const Vec3& dir, const Scene& scene,
                     const RobotBody& robot, const QuadParams& params, const ControllerGains& gains,
                     const HolonomicWeights& weights, const std::vector<double>& speeds,
                     const RolloutSettings& rollout_settings);

struct ConnectorSettings {
  double v_slow = 0.0;     // m/s; <= 0 means 0.5 * epsilon / w_v
  double accel = 0.5;      // m/s^2 ramp, in the weighted-rate sense
  double dt = 0.01;        // s
  int smooth_iterations = 200;
  RrtParams rrt = [] {
    RrtParams p;
    p.fixed_orientation = true;
    return p;
  }();
};

enum class SegmentKind { connector, passage };

struct Segment {
  SegmentKind kind = SegmentKind::connector;
  StateTrajectory trajectory;
  std::size_t narrow_index = 0;  // passages only
  double escape_speed = 0.0;     // passages only
};

struct GlobalPlan {
  std::vector<Segment> segments;

  std::size_t count(SegmentKind kind) const;
  /// Samples of all segments on one clock. Each segment after the first
  /// drops its leading sample, which coincides with the previous segment's end.
  std::vector<TrajectorySample> flatten() const;
  std::size_t sample_count() const;
  double max_speed() const;
};

class PlanningError : public std::runtime_error {
 public:
  PlanningError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Low-speed trajectory from `from` to `to`: turn in place to level,
/// position-only RRT, turn in place to the target orientation. Every sample
/// is near-holonomic. Throws PlanningError("connect", ...) on failure.
StateTrajectory plan_connector(const Configuration& from, const Configuration& to, const Scene& scene,
                               const RobotBody& robot, const QuadParams& params,
                               const HolonomicWeights& weights, const ConnectorSettings& settings,
                               std::uint64_t seed, double budget_s);

/// Time-parameterizes a piecewise path so each sample satisfies
/// w_v |v| + w_omega |Omega| <= min(w_v v_slow, (epsilon - w_r |q - q0|) / 2).
StateTrajectory time_parameterize(const HolonomicPath& path, const QuadParams& params,
                                  const HolonomicWeights& weights, double v_slow, double accel,
                                  double dt);

/// Chains start -> passages -> goal with connectors.
GlobalPlan connect_global(const std::vector<LocalPassage>& passages, const Scene& scene,
                          const RobotBody& robot, const QuadParams& params,
                          const HolonomicWeights& weights, const ConnectorSettings& settings,
                          std::uint64_t seed, double budget_s);

struct PlannerSettings {
  RrtParams rrt;
  RrtVariant variant = RrtVariant::whitelist;
  int smooth_iterations = 200;
  double narrow_h = 0.5;      // m
  double link_radius = 0.5;   // m
  double tangent_span = 0.0;  // m of arc length each side; <= 0 means the robot diameter
  MarginSettings margin;
  EscapeSettings escape;
  SpeedSchedule speeds;
  RolloutSettings rollout;
  int fb_attempts = 3;
  ConnectorSettings connector;
};

/// Everything a planning run needs; what a scene file describes.
struct Problem {
  Scene scene;
  RobotBody robot;
  QuadParams quad;
  ControllerGains gains;
  HolonomicWeights weights;
  PlannerSettings planner;

  void validate() const;
};

struct PlanReport {
  bool success = false;
  std::uint64_t seed = 0;
  double wall_time = 0.0;          // s, not part of the deterministic report
  std::size_t sampled_nodes = 0;
  std::size_t tree_size = 0;
  double path_length = 0.0;        // smoothed holonomic path, m
  std::size_t narrow_points = 0;
  std::size_t clusters = 0;
  std::vector<double> escape_speeds;
  std::vector<int> fb_attempts_used;
  std::vector<std::string> fb_failures;  // one entry per failed attempt
  double max_speed = 0.0;
  std::size_t samples = 0;
  std::string failure_stage;
  std::string failure_detail;
};

struct KatResult {
  GlobalPlan plan;
  PlanReport report;
  HolonomicPath holonomic_path;
  std::vector<NarrowCluster> clusters;
  std::vector<LocalPassage> passages;
  std::vector<Vec3> escape_dirs;
};

/// Full pipeline. Never throws for planning failures; the report carries
/// the failing stage. Invalid input still throws.
KatResult kat(const Problem& problem, std::uint64_t seed, double budget_s);

/// Independent stream for a pipeline stage.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage, std::uint64_t index = 0);

}  // namespace kat
