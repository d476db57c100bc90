#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <random>

namespace kat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Skew-symmetric matrix such that hat(a) * b == a.cross(b).
Mat3 hat(const Vec3& a);

/// Inverse of hat() for (near) skew-symmetric input.
Vec3 vee(const Mat3& s);

/// Rodrigues exponential of hat(w).
Mat3 so3_exp(const Vec3& w);

/// Closest rotation matrix (polar factor) to m.
Mat3 orthonormalize(const Mat3& m);

/// Quaternion with q_r >= 0 (q and -q describe the same rotation).
Quat canonical(const Quat& q);

/// Geodesic angle between two orientations, in [0, pi].
double rotation_angle(const Quat& a, const Quat& b);

/// Uniformly distributed unit quaternion (Shoemake).
Quat random_quaternion(std::mt19937_64& rng);

/// Uniformly distributed unit vector (normalized Gaussian draw).
Vec3 random_unit_vector(std::mt19937_64& rng);

/// Rigid-body pose: position plus unit quaternion, canonical hemisphere.
class Configuration {
 public:
  Configuration() = default;

  /// Normalizes q and flips it to q_r >= 0. Throws std::invalid_argument
  /// for a (near) zero quaternion or non-finite input.
  Configuration(const Vec3& position, const Quat& orientation);

  const Vec3& position() const { return position_; }
  const Quat& orientation() const { return orientation_; }
  Mat3 rotation() const { return orientation_.toRotationMatrix(); }

  Configuration translated(const Vec3& offset) const {
    return Configuration(position_ + offset, orientation_);
  }

  /// Linear in position, spherical-linear in orientation.
  static Configuration interpolate(const Configuration& a, const Configuration& b,
                                   double t);

  bool operator==(const Configuration& other) const;

 private:
  Vec3 position_ = Vec3::Zero();
  Quat orientation_ = Quat::Identity();
};

}  // namespace kat
