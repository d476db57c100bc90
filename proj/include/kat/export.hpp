#pragma once

#include "kat/planner.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace kat {

/// One row per sample: t,x,y,z,qr,qi,qj,qk,vx,vy,vz,wx,wy,wz,f,Mx,My,Mz.
/// Time runs continuously across segments; the junction sample shared by
/// consecutive segments is written once (from the earlier segment).
void write_trajectory_csv(const GlobalPlan& plan, std::ostream& out);

/// Flat "key: value" document. Wall time is left out so that identical
/// inputs give identical bytes.
void write_report(const PlanReport& report, std::ostream& out);

/// Inverse of write_report() for the keys it emits (escape_speeds and
/// fb_failures come back as their raw text).
std::map<std::string, std::string> read_report(std::istream& in);

struct SvgOptions {
  int decimation = 1;     // keep every k-th sample plus the last
  double px_per_m = 80.0;
};

/// Indices kept by decimation: 0, k, 2k, ... and always n - 1.
std::vector<std::size_t> decimated_indices(std::size_t n, int k);

/// XY (top) and XZ (side) projections of the scene obstacles and the plan,
/// colored by speed, with the narrow states of each passage marked.
/// Throws std::invalid_argument for an empty plan.
void write_svg(const GlobalPlan& plan, const Scene& scene, const RobotBody& robot, std::ostream& out,
               const SvgOptions& options = {});

/// File variants; throw std::runtime_error if the path cannot be written.
void export_csv(const GlobalPlan& plan, const std::filesystem::path& path);
void export_report(const PlanReport& report, const std::filesystem::path& path);
void export_svg(const GlobalPlan& plan, const Scene& scene, const RobotBody& robot,
                const std::filesystem::path& path, const SvgOptions& options = {});

}  // namespace kat
