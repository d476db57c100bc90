#include "kat/geometry.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kat {

Mat3 hat(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s) {
  return Vec3(0.5 * (s(2, 1) - s(1, 2)), 0.5 * (s(0, 2) - s(2, 0)),
              0.5 * (s(1, 0) - s(0, 1)));
}

Mat3 so3_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  if (theta < 1e-8) {
    // second-order series; exact to rounding for |w| this small
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

Quat canonical(const Quat& q) {
  Quat n = q.normalized();
  // coeffs() order is (x, y, z, w); tie-break on the first nonzero vector part
  const auto& c = n.coeffs();
  double lead = c[3];
  for (int i = 0; i < 3 && lead == 0.0; ++i) lead = c[i];
  if (lead < 0.0) n.coeffs() *= -1.0;
  return n;
}

double rotation_angle(const Quat& a, const Quat& b) {
  const double d = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return 2.0 * std::acos(d);
}

Quat random_quaternion(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double u1 = u(rng);
  const double u2 = u(rng);
  const double u3 = u(rng);
  const double two_pi = 2.0 * std::numbers::pi;
  const double s1 = std::sqrt(1.0 - u1);
  const double s2 = std::sqrt(u1);
  return Quat(s2 * std::cos(two_pi * u3), s1 * std::sin(two_pi * u2),
              s1 * std::cos(two_pi * u2), s2 * std::sin(two_pi * u3));
}

Vec3 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 d(n(rng), n(rng), n(rng));
    const double len = d.norm();
    if (len > 1e-12) return d / len;
  }
}

Configuration::Configuration(const Vec3& position, const Quat& orientation)
    : position_(position) {
  const double norm = orientation.norm();
  if (!std::isfinite(norm) || norm < 1e-9 || !position.allFinite()) {
    throw std::invalid_argument("Configuration: degenerate quaternion or non-finite position");
  }
  orientation_ = canonical(orientation);
}

Configuration Configuration::interpolate(const Configuration& a, const Configuration& b,
                                         double t) {
  const Vec3 p = (1.0 - t) * a.position_ + t * b.position_;
  // slerp on the short arc; both ends are canonical so flip b if needed
  Quat qb = b.orientation_;
  if (a.orientation_.dot(qb) < 0.0) qb.coeffs() *= -1.0;
  return Configuration(p, a.orientation_.slerp(t, qb));
}

bool Configuration::operator==(const Configuration& other) const {
  return position_ == other.position_ && orientation_.coeffs() == other.orientation_.coeffs();
}

}  // namespace kat
