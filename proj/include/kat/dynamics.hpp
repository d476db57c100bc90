#pragma once

#include "kat/geometry.hpp"

#include <array>
#include <stdexcept>

namespace kat {

/// Gravity direction. The world frame is z-up, so e3 points down and a level
/// hover has thrust f = m g with R = I.
inline const Vec3 kGravityDir(0.0, 0.0, -1.0);

/// Full rigid-body state: position, body-to-world rotation, world-frame
/// velocity and body-frame angular velocity.
struct State {
  Vec3 p = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();

  static State at_rest(const Configuration& c) { return from_configuration(c, Vec3::Zero(), Vec3::Zero()); }
  static State from_configuration(const Configuration& c, const Vec3& v, const Vec3& omega);
  Configuration configuration() const;
  Quat orientation() const;
};

struct QuadParams {
  double m = 1.0;
  Mat3 J = Vec3(0.01, 0.01, 0.02).asDiagonal();
  double d = 0.2;
  double c = 0.05;
  double g = 9.81;
  double f_rotor_max = 8.0;

  /// Throws std::invalid_argument unless all scalars are positive and J is SPD.
  void validate() const;
  double hover_thrust() const { return m * g; }
};

struct Wrench {
  double f = 0.0;
  Vec3 M = Vec3::Zero();
};

struct RotorThrusts {
  std::array<double, 4> f{};
};

struct UnmixResult {
  RotorThrusts thrusts;
  bool feasible = true;
};

struct StateDerivative {
  Vec3 p_dot = Vec3::Zero();
  Mat3 R_dot = Mat3::Zero();
  Vec3 v_dot = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Wrench mix(const RotorThrusts& t, const QuadParams& params);
UnmixResult unmix(const Wrench& w, const QuadParams& params);

/// Clamps every rotor thrust to [0, f_rotor_max] and re-mixes.
Wrench saturate(const Wrench& w, const QuadParams& params);

StateDerivative derivative(const State& s, const Wrench& w, const QuadParams& params);

/// Explicit Euler on (p, v, omega); R <- R exp(hat(omega) dt).
State step_forward(const State& s, const Wrench& w, double dt, const QuadParams& params);

/// Exact inverse of step_forward(): returns s_prev with
/// step_forward(s_prev, w, dt) == s. Throws IntegrationError if the
/// fixed-point iteration on the angular velocity does not converge.
State step_backward(const State& s, const Wrench& w, double dt, const QuadParams& params);

}  // namespace kat
