#include "kat/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kat {

void ControllerGains::validate() const {
  if (!(k_omega > 0.0 && k_zv > 0.0 && k_z > 0.0 && k_v > 0.0)) {
    throw std::invalid_argument("controller gains must be positive");
  }
  if (!(max_tilt > 0.0 && max_tilt < 1.5)) {
    throw std::invalid_argument("max_tilt must lie in (0, 1.5) rad");
  }
}

void HolonomicWeights::validate() const {
  if (!(w_v > 0.0 && w_omega > 0.0 && w_r > 0.0 && epsilon > 0.0)) {
    throw std::invalid_argument("holonomic weights and epsilon must be positive");
  }
}

State mirrored(const State& s) {
  State m = s;
  m.v = -s.v;
  m.omega = -s.omega;
  return m;
}

namespace {

Wrench geometric_forward(const State& s, const QuadParams& params, const ControllerGains& gains) {
  const double hover = params.m * params.g;
  // desired force along the body thrust axis (world frame)
  Vec3 thrust_vec = -(hover * kGravityDir + gains.k_v * s.v);
  thrust_vec.z() = std::max(thrust_vec.z(), 0.25 * hover);
  const double horizontal = thrust_vec.head<2>().norm();
  const double max_horizontal = std::tan(gains.max_tilt) * thrust_vec.z();
  if (horizontal > max_horizontal) thrust_vec.head<2>() *= max_horizontal / horizontal;

  const Vec3 body_up = s.R.col(2);
  Wrench w;
  w.f = thrust_vec.dot(body_up);

  const Vec3 b3d = thrust_vec.normalized();
  const Vec3 b2d = b3d.cross(Vec3::UnitX()).normalized();
  const Vec3 b1d = b2d.cross(b3d);
  Mat3 rd;
  rd.col(0) = b1d;
  rd.col(1) = b2d;
  rd.col(2) = b3d;

  const Vec3 e_r = vee(rd.transpose() * s.R - s.R.transpose() * rd);
  const Vec3 tilt_rate(s.omega.x(), s.omega.y(), 0.0);
  w.M = -gains.k_z * e_r - gains.k_omega * s.omega - gains.k_zv * tilt_rate +
        s.omega.cross(params.J * s.omega);
  return w;
}

}  // namespace

namespace printed {

Mat3 y_matrix() {
  Mat3 y;
  y << 0.0, 1.0, 0.0,
       1.0, 0.0, 0.0,
       0.0, 0.0, 0.0;
  return y;
}

Wrench forward(const State& s, const QuadParams& params, const ControllerGains& gains) {
  const Vec3& e3 = kGravityDir;
  const Vec3 attitude = y_matrix() * (gains.k_zv * s.R.transpose() * hat(s.omega).transpose() - gains.k_z * s.R) * e3;
  Wrench w;
  w.M = -gains.k_omega * s.omega + s.omega.cross(params.J * s.omega) + attitude;
  w.f = (-gains.k_v * s.v + params.m * params.g * e3).dot(s.R * e3);
  return w;
}

Wrench backward(const State& s, const QuadParams& params, const ControllerGains& gains) {
  const Vec3& e3 = kGravityDir;
  const Vec3 attitude = y_matrix() * (gains.k_zv * s.R.transpose() * hat(s.omega).transpose() - gains.k_z * s.R) * e3;
  Wrench w;
  w.M = gains.k_omega * s.omega - s.omega.cross(params.J * s.omega) - attitude;
  w.f = (gains.k_v * s.v + params.m * params.g * e3).dot(s.R * e3);
  return w;
}

}  // namespace printed

Wrench forward_control_raw(const State& s, const QuadParams& params, const ControllerGains& gains) {
  if (gains.law == ControlLaw::printed) return printed::forward(s, params, gains);
  return geometric_forward(s, params, gains);
}

Wrench backward_control_raw(const State& s, const QuadParams& params, const ControllerGains& gains) {
  if (gains.law == ControlLaw::printed) return printed::backward(s, params, gains);
  return geometric_forward(mirrored(s), params, gains);
}

Wrench forward_control(const State& s, const QuadParams& params, const ControllerGains& gains) {
  return saturate(forward_control_raw(s, params, gains), params);
}

Wrench backward_control(const State& s, const QuadParams& params, const ControllerGains& gains) {
  return saturate(backward_control_raw(s, params, gains), params);
}

double holonomic_measure(const State& s, const HolonomicWeights& weights) {
  const Quat q = s.orientation();
  const double dq = (q.coeffs() - Quat::Identity().coeffs()).norm();
  return weights.w_omega * s.omega.norm() + weights.w_v * s.v.norm() + weights.w_r * dq;
}

bool is_near_holonomic(const State& s, const HolonomicWeights& weights) {
  return holonomic_measure(s, weights) < weights.epsilon;
}

}  // namespace kat
