#pragma once

#include "kat/dynamics.hpp"

#include <vector>

namespace kat {

struct TrajectorySample {
  double t = 0.0;
  State state;
  /// Input applied from this sample to the next one.
  Wrench wrench;
};

/// Time-ordered samples with uniform spacing dt.
struct StateTrajectory {
  double dt = 1e-3;
  std::vector<TrajectorySample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  const State& front() const { return samples.front().state; }
  const State& back() const { return samples.back().state; }
  double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
  double max_speed() const;

  /// Rewrites timestamps as t0, t0 + dt, ...
  void retime(double t0);
};

/// Largest per-component deviation when replaying the recorded wrenches
/// through step_forward() from the first sample.
double forward_replay_error(const StateTrajectory& traj, const QuadParams& params);

}  // namespace kat
