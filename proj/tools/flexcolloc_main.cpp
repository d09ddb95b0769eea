#include "flexcolloc/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using flexcolloc::experiment::ExperimentConfig;
using flexcolloc::experiment::ResultRecord;

void add_config_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--problem", cfg.problem,
                  "bryson-denham | cart-pole | sine-approx")
      ->capture_default_str();
  cmd->add_option("--mode", cfg.mode,
                  "a: sample-point bounds, b: Bernstein bounds on a fixed mesh, "
                  "c: Bernstein bounds with flexible breakpoints")
      ->capture_default_str();
  cmd->add_option("--degree", cfg.degree, "collocation degree n")
      ->capture_default_str();
  cmd->add_option("--intervals", cfg.intervals, "sub-interval count n_h")
      ->capture_default_str();
  cmd->add_option("--flex", cfg.flex,
                  "flexibility in [0,1): one uniform value or one per interval")
      ->expected(-1)
      ->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "solver tolerance")->capture_default_str();
  cmd->add_option("--max-iter", cfg.max_iter, "solver iteration cap")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "seed for restart perturbations")
      ->capture_default_str();
  cmd->add_option("--jobs", cfg.jobs, "concurrent sweep points")
      ->capture_default_str();
  cmd->add_option("--out", cfg.out,
                  "output path stem; writes <out>.<format> and trajectory CSVs")
      ->capture_default_str();
  cmd->add_option("--format", cfg.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void print_record(const ResultRecord& r) {
  std::printf("%s mode %s n=%d n_h=%d: %s, %d iterations, %.3g s\n",
              r.config.problem.c_str(), r.config.mode.c_str(), r.config.degree,
              r.config.intervals, r.status.c_str(), r.iterations, r.wall_time_s);
  if (r.status == "error") return;
  std::printf("  objective %.12g  kkt %.3e\n", r.objective, r.kkt_residual);
  std::printf("  cost %.12g  inequality_violation %.3e  dynamic_violation %.3e\n",
              r.report.cost, r.report.inequality_violation,
              r.report.dynamic_violation);
  std::printf("  breakpoints");
  for (double b : r.breakpoints) std::printf(" %.6g", b);
  std::printf("\n");
}

int do_run(const ExperimentConfig& cfg) {
  cfg.validate();
  const ResultRecord record = flexcolloc::experiment::run(cfg);
  print_record(record);
  flexcolloc::experiment::write_outputs({record}, cfg);
  return record.converged() ? 0 : 1;
}

int do_sweep(const ExperimentConfig& cfg, const std::string& axis,
             const std::vector<double>& values) {
  const auto records = flexcolloc::experiment::sweep(cfg, axis, values);
  bool any = false;
  for (const ResultRecord& r : records) {
    print_record(r);
    any = any || r.converged();
  }
  flexcolloc::experiment::write_outputs(records, cfg);
  if (!any) std::fprintf(stderr, "flexcolloc: no sweep point converged\n");
  return any ? 0 : 1;
}

int do_assess(const std::string& path) {
  const auto saved = flexcolloc::experiment::load_trajectory(path);
  const auto rep = flexcolloc::experiment::reassess(saved);
  std::printf("%s, degree %d, %d intervals\n", saved.problem.c_str(), saved.degree,
              saved.trajectory.intervals());
  std::printf("  cost %.12g  inequality_violation %.3e  dynamic_violation %.3e\n",
              rep.cost, rep.inequality_violation, rep.dynamic_violation);
  for (size_t i = 0; i < rep.cost_per_interval.size(); ++i)
    std::printf("  interval %zu [%.6g, %.6g]: cost %.12g  ineq %.3e  dyn %.3e\n",
                i, saved.trajectory.breakpoints[i],
                saved.trajectory.breakpoints[i + 1], rep.cost_per_interval[i],
                rep.inequality_per_interval[i], rep.dynamic_per_interval[i]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Collocation experiments with Bernstein-bounded trajectories on "
      "flexible sub-interval meshes. Set FLEXCOLLOC_LOG=info or debug for "
      "progress output on stderr."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key = value file with the flag names under a [run] or "
                 "[sweep] section; command-line flags win");

  ExperimentConfig run_cfg;
  CLI::App* run_cmd = app.add_subcommand("run", "Solve one configuration");
  run_cmd->fallthrough();
  add_config_options(run_cmd, run_cfg);

  ExperimentConfig sweep_cfg;
  std::string axis = "degree";
  std::vector<double> values;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Solve one configuration per axis value");
  sweep_cmd->fallthrough();
  add_config_options(sweep_cmd, sweep_cfg);
  sweep_cmd->add_option("--axis", axis, "degree | flexibility")
      ->check(CLI::IsMember({"degree", "flexibility"}))
      ->capture_default_str();
  sweep_cmd->add_option("--values", values, "swept values, any order")
      ->expected(-1)
      ->required();

  std::string traj_path;
  CLI::App* assess_cmd =
      app.add_subcommand("assess", "Re-assess a saved trajectory file");
  assess_cmd->add_option("trajectory", traj_path, "file written by run/sweep")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_cfg);
    if (sweep_cmd->parsed()) return do_sweep(sweep_cfg, axis, values);
    return do_assess(traj_path);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "flexcolloc: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "flexcolloc: %s\n", e.what());
    return 3;
  }
}
