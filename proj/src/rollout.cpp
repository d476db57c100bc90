#include "kat/rollout.hpp"

#include <algorithm>

namespace kat {

std::string to_string(RolloutFailure f) {
  switch (f) {
    case RolloutFailure::none: return "none";
    case RolloutFailure::collision: return "collision";
    case RolloutFailure::timeout: return "timeout";
    case RolloutFailure::integration: return "integration";
  }
  return "unknown";
}

namespace {

bool transition_free(const Configuration& from, const Configuration& to, const Scene& scene,
                     const RobotBody& robot, double resolution) {
  if (edge_steps(from, to, robot, resolution) > 1) return edge_is_free(from, to, scene, robot, resolution);
  return !is_collision(to, scene, robot);
}

}  // namespace

RolloutResult rollout(const State& s0, RolloutDirection direction, const Scene& scene,
                      const RobotBody& robot, const QuadParams& params,
                      const ControllerGains& gains, const HolonomicWeights& weights,
                      const RolloutSettings& settings) {
  RolloutResult out;
  out.trajectory.dt = settings.dt;
  const bool forward = direction == RolloutDirection::forward;

  std::vector<TrajectorySample> samples;
  State s = s0;
  Configuration config = s.configuration();
  // wrench recorded with s0 always drives it forward in time
  samples.push_back({0.0, s, forward_control(s, params, gains)});
  if (is_collision(config, scene, robot)) {
    out.failure = RolloutFailure::collision;
    out.trajectory.samples = std::move(samples);
    return out;
  }

  const auto max_steps = static_cast<long>(settings.t_max / settings.dt + 0.5);
  long step = 0;
  while (!is_near_holonomic(s, weights)) {
    if (step >= max_steps) {
      out.failure = RolloutFailure::timeout;
      break;
    }
    ++step;
    State next;
    Wrench w;
    try {
      if (forward) {
        w = forward_control(s, params, gains);
        samples.back().wrench = w;
        next = step_forward(s, w, settings.dt, params);
      } else {
        w = backward_control(s, params, gains);
        next = step_backward(s, w, settings.dt, params);
      }
    } catch (const IntegrationError&) {
      out.failure = RolloutFailure::integration;
      break;
    }
    const Configuration next_config = next.configuration();
    const double t = (forward ? 1.0 : -1.0) * static_cast<double>(step) * settings.dt;
    samples.push_back({t, next, forward ? forward_control(next, params, gains) : w});
    if (!transition_free(config, next_config, scene, robot, settings.edge_resolution)) {
      out.failure = RolloutFailure::collision;
      break;
    }
    s = next;
    config = next_config;
  }

  out.success = out.failure == RolloutFailure::none;
  out.t_end = static_cast<double>(step) * settings.dt;
  if (!forward) std::reverse(samples.begin(), samples.end());
  out.trajectory.samples = std::move(samples);
  out.trajectory.retime(0.0);
  return out;
}

}  // namespace kat
