#pragma once

#include "kat/scene_io.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace kat {

enum class BenchStage {
  full,       // the whole pipeline
  holonomic,  // RRT and smoothing only
};

struct BenchmarkSpec {
  std::string scene;                    // path, relative to the spec file
  std::vector<double> openings_deg;     // empty: use the scene's own tilts
  std::vector<RrtVariant> planners{RrtVariant::whitelist};
  int trials = 30;
  double budget_s = 60.0;
  std::uint64_t first_seed = 0;
  BenchStage stage = BenchStage::full;

  void validate() const;
};

/// Parses a benchmark spec; `scene` is resolved against the spec's directory.
BenchmarkSpec load_benchmark_spec(const std::string& path);

struct TrialResult {
  std::size_t cell = 0;
  double opening_deg = 0.0;
  RrtVariant planner = RrtVariant::whitelist;
  std::uint64_t seed = 0;
  bool success = false;
  double wall_time = 0.0;
  double max_speed = 0.0;
  std::size_t sampled_nodes = 0;
  std::string failure_stage;
  std::vector<double> escape_speeds;
  /// Escape directions and passages of the run, kept for offline checks.
  std::vector<Vec3> escape_dirs;
  std::vector<Vec3> tangents;
  std::vector<double> replay_errors;
};

struct CellSummary {
  double opening_deg = 0.0;
  RrtVariant planner = RrtVariant::whitelist;
  int trials = 0;
  int successes = 0;
  int counted = 0;         // successes left after trimming
  double success_rate = 0.0;
  double mean_time_s = 0.0;
  double mean_max_speed = 0.0;
  double mean_sampled_nodes = 0.0;
};

/// Indices of the successful trials that survive the trim: the fastest and
/// the slowest successful trial (by wall time) are dropped.
std::vector<std::size_t> trimmed(const std::vector<TrialResult>& trials);

CellSummary summarize(const std::vector<TrialResult>& trials);

struct BenchmarkResult {
  std::vector<TrialResult> trials;   // ordered by (cell, seed)
  std::vector<CellSummary> cells;
  bool complete = true;
  std::string error;                 // first crash, when incomplete
};

/// Runs every (cell, seed) trial on `jobs` workers. A trial that throws stops
/// the dispatch of new trials; results gathered so far are returned with
/// complete = false.
BenchmarkResult run_benchmark(const BenchmarkSpec& spec, const SceneFile& scene, int jobs,
                              const std::function<void(const TrialResult&)>& on_trial = {});

/// opening_deg,mean_time_s,mean_max_speed,success_rate
void write_sweep_csv(const BenchmarkResult& result, std::ostream& out);
/// planner,mean_sampled_nodes,mean_time_s,success_rate,counted
void write_planner_csv(const BenchmarkResult& result, std::ostream& out);
/// One line per trial.
void write_trials_csv(const BenchmarkResult& result, std::ostream& out);

std::string to_string(RrtVariant v);
RrtVariant parse_variant(const std::string& name);

}  // namespace kat
