#include "kat/bench.hpp"
#include "kat/export.hpp"
#include "kat/scene_io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitPlanning = 2;

void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("kat"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("KAT_LOG");
  if (!env || !*env) {
    spdlog::set_level(spdlog::level::info);
    return;
  }
  const auto level = spdlog::level::from_str(env);
  // from_str maps unknown names to off; only honour it when asked for
  if (level == spdlog::level::off && std::string(env) != "off") {
    spdlog::set_level(spdlog::level::info);
    spdlog::warn("KAT_LOG='{}' not understood; using info", env);
    return;
  }
  spdlog::set_level(level);
}

struct Overrides {
  std::optional<std::string> planner;
  std::optional<double> dt;
  std::optional<double> narrow_h;
  std::optional<double> link_radius;
  std::optional<int> margin_samples;

  void apply(kat::Problem& p) const {
    if (planner) p.planner.variant = kat::parse_variant(*planner);
    if (dt) p.planner.rollout.dt = *dt;
    if (narrow_h) p.planner.narrow_h = *narrow_h;
    if (link_radius) p.planner.link_radius = *link_radius;
    if (margin_samples) p.planner.margin.n_samples = *margin_samples;
    p.validate();
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--planner", o.planner, "holonomic search variant")->check(CLI::IsMember({"whitelist", "conventional"}));
  cmd->add_option("--dt", o.dt, "rollout step [s]");
  cmd->add_option("--narrow-h", o.narrow_h, "narrow-point probe offset and resample spacing [m]");
  cmd->add_option("--link-radius", o.link_radius, "clustering linkage distance [m]");
  cmd->add_option("--margin-samples", o.margin_samples, "max-margin sample count");
}

int run_plan(const std::string& scene_path, std::uint64_t seed, double budget, const fs::path& out_dir,
             int decimate, const Overrides& ov) {
  kat::SceneFile file = kat::load_scene(scene_path);
  ov.apply(file.problem);
  fs::create_directories(out_dir);

  spdlog::info("planning {} with seed {} (budget {} s)", scene_path, seed, budget);
  const kat::KatResult r = kat::kat(file.problem, seed, budget);
  const auto& rep = r.report;
  for (const auto& f : rep.fb_failures) spdlog::debug("{}", f);

  kat::export_report(rep, out_dir / "report.txt");
  if (!rep.success) {
    spdlog::error("planning failed at stage '{}': {}", rep.failure_stage, rep.failure_detail);
    std::cout << "failure stage=" << rep.failure_stage << " wall_time_s=" << rep.wall_time << '\n';
    return kExitPlanning;
  }
  kat::export_csv(r.plan, out_dir / "trajectory.csv");
  kat::export_svg(r.plan, file.problem.scene, file.problem.robot, out_dir / "trajectory.svg", {decimate});
  spdlog::info("{} passage(s), {} samples, max speed {:.3f} m/s", r.passages.size(), rep.samples, rep.max_speed);
  std::cout << "success max_speed=" << rep.max_speed << " samples=" << rep.samples << " wall_time_s=" << rep.wall_time
            << '\n';
  return kExitOk;
}

int run_bench(const std::string& spec_path, const fs::path& out_dir, int jobs, const Overrides& ov,
              std::optional<int> trials, std::optional<double> budget) {
  kat::BenchmarkSpec spec = kat::load_benchmark_spec(spec_path);
  if (trials) spec.trials = *trials;
  if (budget) spec.budget_s = *budget;
  spec.validate();
  kat::SceneFile scene = kat::load_scene(spec.scene);
  Overrides scene_ov = ov;
  scene_ov.planner.reset();  // planners come from the spec
  scene_ov.apply(scene.problem);
  if (ov.planner) spec.planners = {kat::parse_variant(*ov.planner)};
  fs::create_directories(out_dir);

  spdlog::info("benchmark {}: {} cell(s) x {} trials on {} worker(s)", spec_path,
               spec.planners.size() * std::max<std::size_t>(1, spec.openings_deg.size()), spec.trials, jobs);
  const auto result = kat::run_benchmark(spec, scene, jobs, [](const kat::TrialResult& t) {
    spdlog::info("{} {:g} deg seed {}: {} in {:.2f} s{}", kat::to_string(t.planner), t.opening_deg, t.seed,
                 t.success ? "ok" : "failed", t.wall_time, t.success ? "" : " (" + t.failure_stage + ")");
  });

  auto write = [&](const char* name, auto writer) {
    std::ofstream f(out_dir / name);
    if (!f) throw std::runtime_error("cannot write '" + (out_dir / name).string() + "'");
    writer(result, f);
  };
  write("trials.csv", kat::write_trials_csv);
  write("sweep.csv", kat::write_sweep_csv);
  write("planners.csv", kat::write_planner_csv);

  for (const auto& c : result.cells) {
    std::cout << kat::to_string(c.planner) << " opening " << c.opening_deg << ": success " << c.successes << '/'
              << c.trials << ", counted " << c.counted << ", mean time " << c.mean_time_s << " s, mean max speed "
              << c.mean_max_speed << " m/s, mean nodes " << c.mean_sampled_nodes << '\n';
  }
  if (!result.complete) {
    spdlog::error("benchmark aborted: {}; partial results in {}", result.error, out_dir.string());
    return kExitPlanning;
  }
  return kExitOk;
}

int run_validate(const std::string& scene_path) {
  const kat::SceneFile f = kat::load_scene(scene_path);
  const auto& p = f.problem;
  const auto& ps = p.planner;
  std::cout << scene_path << ": ok\n"
            << "  obstacles: " << p.scene.obstacles().size() << " (" << f.walls.size() << " wall(s))\n"
            << "  robot circumscribed radius: " << p.robot.circumscribed_radius() << " m\n"
            << "  narrow h: " << ps.narrow_h << " m, link radius: " << ps.link_radius << " m\n"
            << "  margin rho: " << ps.margin.rho << " m, delta: " << ps.margin.delta << " m\n"
            << "  escape mu: " << ps.escape.mu << " m, sigma: " << ps.escape.sigma << " m\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"kat: kinodynamic planning through narrow inclined passages"};
  app.require_subcommand(1);

  std::string scene_path;
  std::uint64_t seed = 0;
  double budget = 60.0;
  std::string out = "out";
  int decimate = 10;
  Overrides plan_ov;
  auto* plan = app.add_subcommand("plan", "plan one trajectory and write CSV, report and SVG");
  plan->add_option("--scene", scene_path, "scene YAML")->required();
  plan->add_option("--seed", seed, "random seed");
  plan->add_option("--budget-s", budget, "wall-clock budget [s]")->check(CLI::PositiveNumber);
  plan->add_option("--out", out, "output directory");
  plan->add_option("--svg-decimate", decimate, "keep every k-th sample in the SVG")->check(CLI::PositiveNumber);
  add_overrides(plan, plan_ov);

  std::string spec_path;
  std::string bench_out = "bench_out";
  int jobs = 1;
  std::optional<int> trials;
  std::optional<double> bench_budget;
  Overrides bench_ov;
  auto* bench = app.add_subcommand("bench", "run a benchmark sweep and write CSV tables");
  bench->add_option("--spec", spec_path, "benchmark spec YAML")->required();
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--jobs", jobs, "parallel trials")->check(CLI::PositiveNumber);
  bench->add_option("--trials", trials, "override trials per cell");
  bench->add_option("--budget-s", bench_budget, "override per-trial budget [s]");
  add_overrides(bench, bench_ov);

  std::string lint_path;
  auto* validate = app.add_subcommand("validate", "parse and check a scene file");
  validate->add_option("--scene", lint_path, "scene YAML")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*plan) return run_plan(scene_path, seed, budget, out, decimate, plan_ov);
    if (*bench) return run_bench(spec_path, bench_out, jobs, bench_ov, trials, bench_budget);
    if (*validate) return run_validate(lint_path);
  } catch (const kat::SceneError& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  }
  return kExitInput;
}
