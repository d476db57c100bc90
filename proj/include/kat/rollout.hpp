#pragma once

#include "kat/control.hpp"
#include "kat/trajectory.hpp"
#include "kat/world.hpp"

#include <string>

namespace kat {

enum class RolloutDirection { forward, backward };

enum class RolloutFailure { none, collision, timeout, integration };

std::string to_string(RolloutFailure f);

struct RolloutSettings {
  double t_max = 5.0;            // s of simulated time
  double dt = 1e-3;              // s
  double edge_resolution = 0.01; // m, swept check between samples
};

struct RolloutResult {
  bool success = false;
  RolloutFailure failure = RolloutFailure::none;
  double t_end = 0.0;  // simulated time covered (positive for both directions)
  /// Time-ordered; for backward rollouts the seed state is the last sample.
  StateTrajectory trajectory;
};

/// Closed-loop simulation from s0 until the state is near-holonomic.
/// Backward mode applies backward_control() and step_backward(), producing
/// states earlier in time.
RolloutResult rollout(const State& s0, RolloutDirection direction, const Scene& scene,
                      const RobotBody& robot, const QuadParams& params,
                      const ControllerGains& gains, const HolonomicWeights& weights,
                      const RolloutSettings& settings);

}  // namespace kat
