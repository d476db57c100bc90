#include "kat/trajectory.hpp"

#include <algorithm>

namespace kat {

double StateTrajectory::max_speed() const {
  double best = 0.0;
  for (const auto& s : samples) best = std::max(best, s.state.v.norm());
  return best;
}

void StateTrajectory::retime(double t0) {
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].t = t0 + static_cast<double>(i) * dt;
}

namespace {

double max_component_gap(const State& a, const State& b) {
  double gap = (a.p - b.p).lpNorm<Eigen::Infinity>();
  gap = std::max(gap, (a.R - b.R).lpNorm<Eigen::Infinity>());
  gap = std::max(gap, (a.v - b.v).lpNorm<Eigen::Infinity>());
  gap = std::max(gap, (a.omega - b.omega).lpNorm<Eigen::Infinity>());
  return gap;
}

}  // namespace

double forward_replay_error(const StateTrajectory& traj, const QuadParams& params) {
  if (traj.samples.empty()) return 0.0;
  State s = traj.samples.front().state;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    s = step_forward(s, traj.samples[i].wrench, traj.dt, params);
    worst = std::max(worst, max_component_gap(s, traj.samples[i + 1].state));
  }
  return worst;
}

}  // namespace kat
