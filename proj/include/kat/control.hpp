#pragma once

#include "kat/dynamics.hpp"

namespace kat {

enum class ControlLaw {
  /// Geometric stillness controller: velocity feedback sets the desired thrust
  /// axis, SO(3) attitude error drives the moment. Backward law is the forward
  /// law evaluated on the velocity-mirrored state.
  geometric,
  /// Literal transcription of the sign-flipped forward/backward pair with the
  /// fixed Y matrix. Kept for reference; it does not stabilize horizontal
  /// velocity.
  printed,
};

struct ControllerGains {
  double k_omega = 0.06;  // body-rate damping
  double k_zv = 0.02;     // extra tilt-rate damping
  double k_z = 0.2;       // attitude stiffness
  double k_v = 2.0;       // translational velocity gain
  double max_tilt = 0.6;  // rad, cap on the commanded thrust-axis tilt
  ControlLaw law = ControlLaw::geometric;

  void validate() const;
};

/// Near-holonomic set: w_omega |Omega| + w_v |v| + w_r |q - q0| < epsilon.
struct HolonomicWeights {
  double w_v = 1.0;
  double w_omega = 0.2;
  double w_r = 1.0;
  double epsilon = 0.3;

  void validate() const;
};

/// Controller output before rotor saturation.
Wrench forward_control_raw(const State& s, const QuadParams& params, const ControllerGains& gains);
Wrench backward_control_raw(const State& s, const QuadParams& params, const ControllerGains& gains);

/// Saturated (per-rotor clamped) controller outputs.
Wrench forward_control(const State& s, const QuadParams& params, const ControllerGains& gains);
Wrench backward_control(const State& s, const QuadParams& params, const ControllerGains& gains);

namespace printed {
Wrench forward(const State& s, const QuadParams& params, const ControllerGains& gains);
Wrench backward(const State& s, const QuadParams& params, const ControllerGains& gains);
Mat3 y_matrix();
}  // namespace printed

/// The same pose with velocity and body rate negated. Running the forward
/// law on the mirrored state is the time-reversed closed loop.
State mirrored(const State& s);

double holonomic_measure(const State& s, const HolonomicWeights& weights);
bool is_near_holonomic(const State& s, const HolonomicWeights& weights);

}  // namespace kat
