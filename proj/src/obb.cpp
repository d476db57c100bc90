#include "kat/obb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kat {

Vec3 Obb::support(const Vec3& dir) const {
  Vec3 p = center;
  for (int i = 0; i < 3; ++i) {
    const double s = axes.col(i).dot(dir) >= 0.0 ? 1.0 : -1.0;
    p += s * half[i] * axes.col(i);
  }
  return p;
}

std::array<Vec3, 8> Obb::corners() const {
  std::array<Vec3, 8> out;
  for (int k = 0; k < 8; ++k) {
    Vec3 p = center;
    for (int i = 0; i < 3; ++i) {
      const double s = (k >> i) & 1 ? 1.0 : -1.0;
      p += s * half[i] * axes.col(i);
    }
    out[k] = p;
  }
  return out;
}

double Obb::distance_to_point(const Vec3& p) const {
  const Vec3 local = axes.transpose() * (p - center);
  Vec3 excess;
  for (int i = 0; i < 3; ++i) excess[i] = std::max(0.0, std::abs(local[i]) - half[i]);
  return excess.norm();
}

bool Obb::contains(const Vec3& p) const {
  const Vec3 local = axes.transpose() * (p - center);
  return (local.cwiseAbs() - half).maxCoeff() <= 0.0;
}

bool obb_overlap(const Obb& a, const Obb& b) {
  constexpr double kEps = 1e-12;
  const Mat3 r = a.axes.transpose() * b.axes;
  const Vec3 t = a.axes.transpose() * (b.center - a.center);
  Mat3 abs_r = r.cwiseAbs();
  abs_r.array() += kEps;
  const Vec3& ea = a.half;
  const Vec3& eb = b.half;

  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > ea[i] + eb.dot(abs_r.row(i))) return false;
  }
  for (int j = 0; j < 3; ++j) {
    const double ra = ea.dot(abs_r.col(j));
    if (std::abs(t.dot(r.col(j))) > ra + eb[j]) return false;
  }
  // a_i x b_j
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    const int i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3;
      const int j2 = (j + 2) % 3;
      const double ra = ea[i1] * abs_r(i2, j) + ea[i2] * abs_r(i1, j);
      const double rb = eb[j1] * abs_r(i, j2) + eb[j2] * abs_r(i, j1);
      const double dist = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
      if (dist > ra + rb) return false;
    }
  }
  return true;
}

namespace {

// Closest point to the origin on a simplex; shrinks the simplex to the
// supporting feature. Returns false if the origin lies inside a tetrahedron.
struct Simplex {
  std::array<Vec3, 4> pts;
  int size = 0;
};

Vec3 closest_on_segment(Simplex& s) {
  const Vec3 a = s.pts[0];
  const Vec3 b = s.pts[1];
  const Vec3 ab = b - a;
  const double denom = ab.squaredNorm();
  const double t = denom > 0.0 ? -a.dot(ab) / denom : 0.0;
  if (t <= 0.0) {
    s.size = 1;
    return a;
  }
  if (t >= 1.0) {
    s.pts[0] = b;
    s.size = 1;
    return b;
  }
  return a + t * ab;
}

Vec3 closest_on_triangle(Simplex& s) {
  const Vec3 a = s.pts[0];
  const Vec3 b = s.pts[1];
  const Vec3 c = s.pts[2];
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = -a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) {
    s.size = 1;
    return a;
  }
  const Vec3 bp = -b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) {
    s.pts[0] = b;
    s.size = 1;
    return b;
  }
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    s.size = 2;
    return a + v * ab;
  }
  const Vec3 cp = -c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) {
    s.pts[0] = c;
    s.size = 1;
    return c;
  }
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    s.pts[1] = c;
    s.size = 2;
    return a + w * ac;
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    s.pts[0] = b;
    s.pts[1] = c;
    s.size = 2;
    return b + w * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

bool origin_outside_face(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 n = (b - a).cross(c - a);
  const double sign_p = -a.dot(n);
  const double sign_d = (d - a).dot(n);
  if (std::abs(sign_d) < 1e-18) return true;  // flat tetrahedron
  return sign_p * sign_d < 0.0;
}

// Returns false when the origin is enclosed.
bool closest_on_tetrahedron(Simplex& s, Vec3& out) {
  const std::array<std::array<int, 4>, 4> faces = {{{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {1, 3, 2, 0}}};
  double best = std::numeric_limits<double>::infinity();
  Simplex best_s;
  bool any_outside = false;
  for (const auto& f : faces) {
    if (!origin_outside_face(s.pts[f[0]], s.pts[f[1]], s.pts[f[2]], s.pts[f[3]])) continue;
    any_outside = true;
    Simplex tri;
    tri.pts = {s.pts[f[0]], s.pts[f[1]], s.pts[f[2]], Vec3::Zero()};
    tri.size = 3;
    const Vec3 q = closest_on_triangle(tri);
    const double d = q.squaredNorm();
    if (d < best) {
      best = d;
      best_s = tri;
      out = q;
    }
  }
  if (!any_outside) return false;
  s = best_s;
  return true;
}

}  // namespace

double obb_distance(const Obb& a, const Obb& b) {
  auto support = [&](const Vec3& d) { return a.support(d) - b.support(-d); };

  Vec3 v = a.center - b.center;
  if (v.squaredNorm() < 1e-24) return 0.0;
  Simplex s;
  constexpr double kRel = 1e-12;

  for (int iter = 0; iter < 128; ++iter) {
    const Vec3 w = support(-v);
    const double vv = v.squaredNorm();
    if (vv - v.dot(w) <= kRel * vv) break;
    bool duplicate = false;
    for (int i = 0; i < s.size; ++i) {
      if ((s.pts[i] - w).squaredNorm() < 1e-24) duplicate = true;
    }
    if (duplicate) break;
    s.pts[s.size++] = w;

    switch (s.size) {
      case 1:
        v = s.pts[0];
        break;
      case 2:
        v = closest_on_segment(s);
        break;
      case 3:
        v = closest_on_triangle(s);
        break;
      default:
        if (!closest_on_tetrahedron(s, v)) return 0.0;
        break;
    }
    if (v.squaredNorm() < 1e-24) return 0.0;
  }
  return v.norm();
}

}  // namespace kat
