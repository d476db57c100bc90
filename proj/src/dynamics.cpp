#include "kat/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace kat {

namespace {

// One Newton-Schulz polar iteration; R must already be close to SO(3).
Mat3 reorthonormalize(const Mat3& r) {
  return 0.5 * r * (3.0 * Mat3::Identity() - r.transpose() * r);
}

Vec3 angular_accel(const Vec3& omega, const Vec3& moment, const QuadParams& params) {
  return params.J.inverse() * (moment - omega.cross(params.J * omega));
}

Vec3 linear_accel(const Mat3& r, double thrust, const QuadParams& params) {
  return params.g * kGravityDir - (thrust / params.m) * (r * kGravityDir);
}

}  // namespace

State State::from_configuration(const Configuration& c, const Vec3& v, const Vec3& omega) {
  State s;
  s.p = c.position();
  s.R = c.rotation();
  s.v = v;
  s.omega = omega;
  return s;
}

Quat State::orientation() const { return canonical(Quat(R)); }

Configuration State::configuration() const { return Configuration(p, Quat(R)); }

void QuadParams::validate() const {
  if (!(m > 0.0 && d > 0.0 && c > 0.0 && g > 0.0 && f_rotor_max > 0.0)) {
    throw std::invalid_argument("quad parameters m, d, c, g, f_rotor_max must be positive");
  }
  if (!J.isApprox(J.transpose(), 1e-12)) throw std::invalid_argument("inertia J must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(J);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("inertia J must be positive definite");
}

Wrench mix(const RotorThrusts& t, const QuadParams& params) {
  const auto& f = t.f;
  Wrench w;
  w.f = f[0] + f[1] + f[2] + f[3];
  w.M = Vec3(params.d * (f[3] - f[1]), params.d * (f[0] - f[2]),
             params.c * (-f[0] + f[1] - f[2] + f[3]));
  return w;
}

UnmixResult unmix(const Wrench& w, const QuadParams& params) {
  const double a = 0.25 * w.f;
  const double roll = w.M.x() / (2.0 * params.d);
  const double pitch = w.M.y() / (2.0 * params.d);
  const double yaw = w.M.z() / (4.0 * params.c);
  UnmixResult out;
  out.thrusts.f = {a + pitch - yaw, a - roll + yaw, a - pitch - yaw, a + roll + yaw};
  for (double fi : out.thrusts.f) {
    if (fi < 0.0 || fi > params.f_rotor_max) out.feasible = false;
  }
  return out;
}

Wrench saturate(const Wrench& w, const QuadParams& params) {
  UnmixResult u = unmix(w, params);
  if (u.feasible) return w;
  for (double& fi : u.thrusts.f) fi = std::clamp(fi, 0.0, params.f_rotor_max);
  return mix(u.thrusts, params);
}

StateDerivative derivative(const State& s, const Wrench& w, const QuadParams& params) {
  StateDerivative d;
  d.p_dot = s.v;
  d.v_dot = linear_accel(s.R, w.f, params);
  d.R_dot = s.R * hat(s.omega);
  d.omega_dot = angular_accel(s.omega, w.M, params);
  return d;
}

State step_forward(const State& s, const Wrench& w, double dt, const QuadParams& params) {
  State n;
  n.p = s.p + dt * s.v;
  n.v = s.v + dt * linear_accel(s.R, w.f, params);
  n.R = reorthonormalize(s.R * so3_exp(dt * s.omega));
  n.omega = s.omega + dt * angular_accel(s.omega, w.M, params);
  return n;
}

State step_backward(const State& s, const Wrench& w, double dt, const QuadParams& params) {
  // omega_next = omega + dt * a(omega): solve for omega by fixed point
  Vec3 omega = s.omega;
  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    const Vec3 next = s.omega - dt * angular_accel(omega, w.M, params);
    const double change = (next - omega).lpNorm<Eigen::Infinity>();
    omega = next;
    if (change <= 1e-15 * std::max(1.0, omega.lpNorm<Eigen::Infinity>())) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    const Vec3 residual = omega + dt * angular_accel(omega, w.M, params) - s.omega;
    if (!(residual.lpNorm<Eigen::Infinity>() <= 1e-12)) {  // NaN after divergence counts as failure
      throw IntegrationError("step_backward: angular velocity fixed point did not converge (dt too large)");
    }
  }

  State prev;
  prev.omega = omega;
  prev.R = reorthonormalize(s.R * so3_exp(-dt * omega));
  prev.v = s.v - dt * linear_accel(prev.R, w.f, params);
  prev.p = s.p - dt * prev.v;
  return prev;
}

}  // namespace kat
