#include "kat/export.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kat {

namespace {

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

template <typename T, typename F>
std::string list(const std::vector<T>& xs, F fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt(xs[i]);
  }
  return out + "]";
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

void write_trajectory_csv(const GlobalPlan& plan, std::ostream& out) {
  out << "t,x,y,z,qr,qi,qj,qk,vx,vy,vz,wx,wy,wz,f,Mx,My,Mz\n";
  for (const auto& s : plan.flatten()) {
    const State& x = s.state;
    const Quat q = x.orientation();
    const double row[] = {s.t,         x.p.x(),     x.p.y(),     x.p.z(),     q.w(),       q.x(),
                          q.y(),       q.z(),       x.v.x(),     x.v.y(),     x.v.z(),     x.omega.x(),
                          x.omega.y(), x.omega.z(), s.wrench.f,  s.wrench.M.x(), s.wrench.M.y(), s.wrench.M.z()};
    for (std::size_t i = 0; i < std::size(row); ++i) out << (i ? "," : "") << num(row[i]);
    out << '\n';
  }
}

void write_report(const PlanReport& r, std::ostream& out) {
  out << "success: " << (r.success ? "true" : "false") << '\n';
  out << "seed: " << r.seed << '\n';
  out << "sampled_nodes: " << r.sampled_nodes << '\n';
  out << "tree_size: " << r.tree_size << '\n';
  if (r.success || r.path_length > 0.0) out << "path_length: " << num(r.path_length) << '\n';
  out << "narrow_points: " << r.narrow_points << '\n';
  out << "clusters: " << r.clusters << '\n';
  out << "escape_speeds: " << list(r.escape_speeds, num) << '\n';
  out << "fb_attempts: " << list(r.fb_attempts_used, [](int v) { return std::to_string(v); }) << '\n';
  out << "fb_failed_attempts: " << r.fb_failures.size() << '\n';
  if (r.success) {
    out << "max_speed: " << num(r.max_speed) << '\n';
    out << "samples: " << r.samples << '\n';
  } else {
    out << "failure_stage: " << r.failure_stage << '\n';
    out << "failure_detail: " << r.failure_detail << '\n';
  }
}

std::map<std::string, std::string> read_report(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return kv;
}

std::vector<std::size_t> decimated_indices(std::size_t n, int k) {
  if (k < 1) throw std::invalid_argument("decimation factor must be at least 1");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(k)) idx.push_back(i);
  if (n > 0 && idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

namespace {

using P2 = Eigen::Vector2d;

double cross(const P2& o, const P2& a, const P2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

// Andrew's monotone chain
std::vector<P2> hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k > 1 ? k - 1 : k);
  return h;
}

std::string speed_color(double s) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{
      {0.19, 0.21, 0.58}, {0.13, 0.57, 0.55}, {0.37, 0.79, 0.38}, {0.99, 0.75, 0.18}, {0.84, 0.15, 0.16}}};
  s = std::clamp(s, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(s), stops.size() - 2);
  const double f = s - static_cast<double>(i);
  char buf[16];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(255.0 * ((1 - f) * stops[i][c] + f * stops[i + 1][c]) + 0.5);
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

struct Panel {
  std::string id;
  std::string title;
  int ax = 0, ay = 1;  // world axes shown horizontally / vertically
  double ox = 0, oy = 0;
  double width = 0, height = 0;
  double lo_x = 0, lo_y = 0, scale = 1;

  P2 map(const Vec3& p) const {
    return {ox + (p[ax] - lo_x) * scale, oy + height - (p[ay] - lo_y) * scale};
  }
};

}  // namespace

void write_svg(const GlobalPlan& plan, const Scene& scene, const RobotBody& robot, std::ostream& out,
               const SvgOptions& options) {
  const auto samples = plan.flatten();
  if (samples.empty()) throw std::invalid_argument("write_svg: plan has no samples");
  const auto keep = decimated_indices(samples.size(), options.decimation);

  const Aabb& b = scene.bounds();
  const double s = options.px_per_m;
  const double pad = 40.0;
  Panel xy{"xy", "top view (x, y)", 0, 1, pad, pad, (b.hi.x() - b.lo.x()) * s, (b.hi.y() - b.lo.y()) * s,
           b.lo.x(), b.lo.y(), s};
  Panel xz{"xz", "side view (x, z)", 0, 2, pad, 2 * pad + xy.height + 20, (b.hi.x() - b.lo.x()) * s,
           (b.hi.z() - b.lo.z()) * s, b.lo.x(), b.lo.z(), s};
  const double total_w = xy.width + 2 * pad;
  const double total_h = xz.oy + xz.height + pad + 20;

  double vmax = 0.0;
  for (const auto& smp : samples) vmax = std::max(vmax, smp.state.v.norm());
  const double vnorm = vmax > 0.0 ? vmax : 1.0;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(total_w) << "\" height=\"" << px(total_h)
      << "\" viewBox=\"0 0 " << px(total_w) << ' ' << px(total_h) << "\">\n";
  out << "<defs>\n";
  for (const Panel* p : {&xy, &xz}) {
    out << "  <clipPath id=\"clip-" << p->id << "\"><rect x=\"" << px(p->ox) << "\" y=\"" << px(p->oy)
        << "\" width=\"" << px(p->width) << "\" height=\"" << px(p->height) << "\"/></clipPath>\n";
  }
  out << "</defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  std::vector<std::pair<Vec3, Quat>> narrow;
  for (const auto& seg : plan.segments) {
    if (seg.kind == SegmentKind::passage && seg.narrow_index < seg.trajectory.size()) {
      const State& st = seg.trajectory.samples[seg.narrow_index].state;
      narrow.emplace_back(st.p, st.orientation());
    }
  }

  for (const Panel* p : {&xy, &xz}) {
    out << "<g id=\"" << p->id << "\">\n";
    out << "  <text x=\"" << px(p->ox) << "\" y=\"" << px(p->oy - 8) << "\" font-family=\"sans-serif\" font-size=\"13\">"
        << p->title << "</text>\n";
    out << "  <rect x=\"" << px(p->ox) << "\" y=\"" << px(p->oy) << "\" width=\"" << px(p->width) << "\" height=\""
        << px(p->height) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "  <g clip-path=\"url(#clip-" << p->id << ")\">\n";
    for (const Obb& box : scene.boxes()) {
      std::vector<P2> pts;
      for (const Vec3& c : box.corners()) pts.push_back(p->map(c));
      out << "    <polygon class=\"obstacle\" points=\"";
      const auto h = hull(pts);
      for (std::size_t i = 0; i < h.size(); ++i) out << (i ? " " : "") << px(h[i].x()) << ',' << px(h[i].y());
      out << "\" fill=\"#9aa0a6\" fill-opacity=\"0.55\" stroke=\"#5f6368\" stroke-width=\"0.5\"/>\n";
    }
    out << "    <polyline class=\"trajectory\" points=\"";
    for (std::size_t i = 0; i < keep.size(); ++i) {
      const P2 q = p->map(samples[keep[i]].state.p);
      out << (i ? " " : "") << px(q.x()) << ',' << px(q.y());
    }
    out << "\" fill=\"none\" stroke=\"#202124\" stroke-width=\"0.4\"/>\n";
    out << "    <g class=\"speed\" stroke-width=\"2\" stroke-linecap=\"round\">\n";
    for (std::size_t i = 1; i < keep.size(); ++i) {
      const P2 a = p->map(samples[keep[i - 1]].state.p);
      const P2 c = p->map(samples[keep[i]].state.p);
      const double v = 0.5 * (samples[keep[i - 1]].state.v.norm() + samples[keep[i]].state.v.norm());
      out << "      <line x1=\"" << px(a.x()) << "\" y1=\"" << px(a.y()) << "\" x2=\"" << px(c.x()) << "\" y2=\""
          << px(c.y()) << "\" stroke=\"" << speed_color(v / vnorm) << "\"/>\n";
    }
    out << "    </g>\n";
    for (const auto& [pos, q] : narrow) {
      std::vector<P2> pts;
      for (const Vec3& c : robot.at(Configuration(pos, q)).corners()) pts.push_back(p->map(c));
      const auto h = hull(pts);
      out << "    <polygon class=\"narrow\" points=\"";
      for (std::size_t i = 0; i < h.size(); ++i) out << (i ? " " : "") << px(h[i].x()) << ',' << px(h[i].y());
      out << "\" fill=\"none\" stroke=\"#c5221f\" stroke-width=\"1.2\"/>\n";
      const P2 c = p->map(pos);
      out << "    <circle class=\"narrow-center\" cx=\"" << px(c.x()) << "\" cy=\"" << px(c.y())
          << "\" r=\"3\" fill=\"#c5221f\"/>\n";
    }
    for (const Vec3* e : {&scene.start().position(), &scene.goal().position()}) {
      const P2 c = p->map(*e);
      out << "    <circle class=\"endpoint\" cx=\"" << px(c.x()) << "\" cy=\"" << px(c.y())
          << "\" r=\"4\" fill=\"none\" stroke=\"#1a73e8\" stroke-width=\"1.5\"/>\n";
    }
    out << "  </g>\n</g>\n";
  }
  out << "<text x=\"" << px(pad) << "\" y=\"" << px(total_h - 12)
      << "\" font-family=\"sans-serif\" font-size=\"12\">speed 0 (blue) to " << num(vmax)
      << " m/s (red)</text>\n";
  out << "</svg>\n";
}

void export_csv(const GlobalPlan& plan, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_trajectory_csv(plan, out);
  finish(out, path);
}

void export_report(const PlanReport& report, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_report(report, out);
  finish(out, path);
}

void export_svg(const GlobalPlan& plan, const Scene& scene, const RobotBody& robot,
                const std::filesystem::path& path, const SvgOptions& options) {
  if (plan.flatten().empty()) throw std::invalid_argument("export_svg: plan has no samples");
  auto out = open_for_write(path);
  write_svg(plan, scene, robot, out, options);
  finish(out, path);
}

}  // namespace kat
