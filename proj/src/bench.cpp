#include "kat/bench.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

namespace kat {

std::string to_string(RrtVariant v) { return v == RrtVariant::whitelist ? "whitelist" : "conventional"; }

RrtVariant parse_variant(const std::string& name) {
  if (name == "whitelist") return RrtVariant::whitelist;
  if (name == "conventional") return RrtVariant::conventional;
  throw std::invalid_argument("unknown planner '" + name + "' (expected whitelist or conventional)");
}

void BenchmarkSpec::validate() const {
  if (trials < 3) throw std::invalid_argument("benchmark needs at least 3 trials per cell");
  if (!(budget_s > 0.0)) throw std::invalid_argument("benchmark budget must be positive");
  if (planners.empty()) throw std::invalid_argument("benchmark needs at least one planner");
  for (double a : openings_deg) {
    if (!std::isfinite(a)) throw std::invalid_argument("opening angles must be finite");
  }
}

BenchmarkSpec load_benchmark_spec(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw SceneError("cannot open benchmark spec '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw SceneError(path + ":" + std::to_string(e.mark.line + 1) + ": malformed document: " + e.msg);
  }
  auto fail = [&](const YAML::Node& n, const std::string& field, const std::string& why) {
    throw SceneError(path + ":" + std::to_string(n.Mark().line + 1) + ": " + field + ": " + why);
  };
  if (!root.IsMap()) fail(root, "spec", "expected a mapping");
  static const std::set<std::string> keys{"scene", "openings_deg", "planners", "trials", "budget_s", "first_seed", "stage"};
  for (const auto& kv : root) {
    if (!keys.count(kv.first.as<std::string>())) fail(kv.first, kv.first.as<std::string>(), "unknown key");
  }

  BenchmarkSpec spec;
  try {
    if (!root["scene"]) fail(root, "scene", "missing");
    const std::filesystem::path scene = root["scene"].as<std::string>();
    spec.scene = scene.is_absolute() ? scene.string() : (std::filesystem::path(path).parent_path() / scene).string();
    if (root["openings_deg"]) spec.openings_deg = root["openings_deg"].as<std::vector<double>>();
    if (root["planners"]) {
      spec.planners.clear();
      for (const auto& p : root["planners"]) {
        try {
          spec.planners.push_back(parse_variant(p.as<std::string>()));
        } catch (const std::invalid_argument& e) {
          fail(p, "planners", e.what());
        }
      }
    }
    if (root["trials"]) spec.trials = root["trials"].as<int>();
    if (root["budget_s"]) spec.budget_s = root["budget_s"].as<double>();
    if (root["first_seed"]) spec.first_seed = root["first_seed"].as<std::uint64_t>();
    if (root["stage"]) {
      const auto s = root["stage"].as<std::string>();
      if (s == "full") spec.stage = BenchStage::full;
      else if (s == "holonomic") spec.stage = BenchStage::holonomic;
      else fail(root["stage"], "stage", "expected full or holonomic");
    }
  } catch (const YAML::BadConversion& e) {
    throw SceneError(path + ":" + std::to_string(e.mark.line + 1) + ": wrong value type: " + e.msg);
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw SceneError(path + ": " + e.what());
  }
  return spec;
}

std::vector<std::size_t> trimmed(const std::vector<TrialResult>& trials) {
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].success) ok.push_back(i);
  }
  if (ok.size() <= 2) return {};
  // ties broken by position so the rule is deterministic
  std::stable_sort(ok.begin(), ok.end(), [&](std::size_t a, std::size_t b) {
    return trials[a].wall_time < trials[b].wall_time;
  });
  std::vector<std::size_t> kept(ok.begin() + 1, ok.end() - 1);
  std::sort(kept.begin(), kept.end());
  return kept;
}

CellSummary summarize(const std::vector<TrialResult>& trials) {
  CellSummary c;
  if (trials.empty()) return c;
  c.opening_deg = trials.front().opening_deg;
  c.planner = trials.front().planner;
  c.trials = static_cast<int>(trials.size());
  for (const auto& t : trials) c.successes += t.success ? 1 : 0;
  c.success_rate = static_cast<double>(c.successes) / c.trials;
  const auto kept = trimmed(trials);
  c.counted = static_cast<int>(kept.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (kept.empty()) {
    c.mean_time_s = c.mean_max_speed = c.mean_sampled_nodes = nan;
    return c;
  }
  for (std::size_t i : kept) {
    c.mean_time_s += trials[i].wall_time;
    c.mean_max_speed += trials[i].max_speed;
    c.mean_sampled_nodes += static_cast<double>(trials[i].sampled_nodes);
  }
  c.mean_time_s /= c.counted;
  c.mean_max_speed /= c.counted;
  c.mean_sampled_nodes /= c.counted;
  return c;
}

namespace {

struct Cell {
  double opening_deg = 0.0;
  RrtVariant planner = RrtVariant::whitelist;
  Problem problem;
};

TrialResult run_trial(const Cell& cell, std::size_t cell_index, std::uint64_t seed, const BenchmarkSpec& spec) {
  TrialResult t;
  t.cell = cell_index;
  t.opening_deg = cell.opening_deg;
  t.planner = cell.planner;
  t.seed = seed;
  const Problem& p = cell.problem;
  if (spec.stage == BenchStage::holonomic) {
    const auto t0 = std::chrono::steady_clock::now();
    const RrtResult rrt = plan_rrt(p.scene, p.robot, derive_seed(seed, 1), spec.budget_s, p.planner.rrt, cell.planner);
    if (rrt.success) smooth(rrt.path, p.scene, p.robot, p.planner.smooth_iterations, derive_seed(seed, 2), p.planner.rrt.edge_resolution);
    t.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    t.success = rrt.success;
    t.sampled_nodes = rrt.sampled_nodes;
    if (!rrt.success) t.failure_stage = "rrt";
    return t;
  }
  const KatResult r = kat::kat(p, seed, spec.budget_s);
  t.success = r.report.success;
  t.wall_time = r.report.wall_time;
  t.max_speed = r.report.max_speed;
  t.sampled_nodes = r.report.sampled_nodes;
  t.failure_stage = r.report.failure_stage;
  t.escape_speeds = r.report.escape_speeds;
  t.escape_dirs = r.escape_dirs;
  for (std::size_t i = 0; i < r.passages.size() && i < r.clusters.size(); ++i) t.tangents.push_back(r.clusters[i].tangent);
  for (const auto& lp : r.passages) t.replay_errors.push_back(forward_replay_error(lp.trajectory, p.quad));
  return t;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkSpec& spec, const SceneFile& scene, int jobs,
                              const std::function<void(const TrialResult&)>& on_trial) {
  spec.validate();
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");

  std::vector<Cell> cells;
  for (RrtVariant planner : spec.planners) {
    if (spec.openings_deg.empty()) {
      Cell c{scene.walls.empty() ? 0.0 : scene.walls.front().tilt * 180.0 / std::numbers::pi, planner, scene.problem};
      c.problem.planner.variant = planner;
      cells.push_back(std::move(c));
    }
    for (double deg : spec.openings_deg) {
      Cell c{deg, planner, with_wall_tilt(scene, deg * std::numbers::pi / 180.0)};
      c.problem.planner.variant = planner;
      cells.push_back(std::move(c));
    }
  }

  const std::size_t per_cell = static_cast<std::size_t>(spec.trials);
  const std::size_t n_tasks = cells.size() * per_cell;
  std::vector<TrialResult> results(n_tasks);
  std::vector<char> done(n_tasks, 0);
  std::atomic<bool> abort{false};
  std::string error;

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::size_t k = 0; k < n_tasks; ++k) {
    if (abort.load()) continue;
    const std::size_t ci = k / per_cell;
    const std::uint64_t seed = spec.first_seed + k % per_cell;
    try {
      results[k] = run_trial(cells[ci], ci, seed, spec);
      done[k] = 1;
#pragma omp critical(kat_bench_report)
      if (on_trial) on_trial(results[k]);
    } catch (const std::exception& e) {
#pragma omp critical(kat_bench_error)
      if (!abort.exchange(true)) error = "trial (cell " + std::to_string(ci) + ", seed " + std::to_string(seed) + "): " + e.what();
    }
  }

  BenchmarkResult out;
  out.complete = !abort.load();
  out.error = error;
  for (std::size_t k = 0; k < n_tasks; ++k) {
    if (done[k]) out.trials.push_back(std::move(results[k]));
  }
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    std::vector<TrialResult> cell_trials;
    for (const auto& t : out.trials) {
      if (t.cell == ci) cell_trials.push_back(t);
    }
    if (cell_trials.empty()) continue;
    out.cells.push_back(summarize(cell_trials));
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(const BenchmarkResult& result, std::ostream& out) {
  out << "opening_deg,mean_time_s,mean_max_speed,success_rate\n";
  for (const auto& c : result.cells) {
    out << fmt(c.opening_deg) << ',' << fmt(c.mean_time_s) << ',' << fmt(c.mean_max_speed) << ','
        << fmt(c.success_rate) << '\n';
  }
}

void write_planner_csv(const BenchmarkResult& result, std::ostream& out) {
  out << "planner,opening_deg,mean_sampled_nodes,mean_time_s,success_rate,counted\n";
  for (const auto& c : result.cells) {
    out << to_string(c.planner) << ',' << fmt(c.opening_deg) << ',' << fmt(c.mean_sampled_nodes) << ','
        << fmt(c.mean_time_s) << ',' << fmt(c.success_rate) << ',' << c.counted << '\n';
  }
}

void write_trials_csv(const BenchmarkResult& result, std::ostream& out) {
  out << "cell,planner,opening_deg,seed,success,wall_time_s,max_speed,sampled_nodes,failure_stage\n";
  for (const auto& t : result.trials) {
    out << t.cell << ',' << to_string(t.planner) << ',' << fmt(t.opening_deg) << ',' << t.seed << ','
        << (t.success ? 1 : 0) << ',' << fmt(t.wall_time) << ',' << fmt(t.max_speed) << ',' << t.sampled_nodes
        << ',' << t.failure_stage << '\n';
  }
}

}  // namespace kat
