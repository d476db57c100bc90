#pragma once

#include "kat/geometry.hpp"

#include <array>

namespace kat {

/// Oriented box: columns of `axes` are the box axes in world coordinates.
struct Obb {
  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 half = Vec3::Ones();

  Vec3 support(const Vec3& dir) const;
  std::array<Vec3, 8> corners() const;
  double bounding_radius() const { return half.norm(); }

  double distance_to_point(const Vec3& p) const;
  bool contains(const Vec3& p) const;
};

/// Separating-axis test over the 15 candidate axes. Touching boxes overlap.
bool obb_overlap(const Obb& a, const Obb& b);

/// Euclidean distance between two boxes (GJK); 0 when they overlap.
double obb_distance(const Obb& a, const Obb& b);

}  // namespace kat
