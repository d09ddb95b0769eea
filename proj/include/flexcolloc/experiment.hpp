#pragma once

#include "flexcolloc/assessment.hpp"
#include "flexcolloc/nlp.hpp"
#include "flexcolloc/transcription.hpp"

#include <string>
#include <vector>

namespace flexcolloc::experiment {

/// One experiment point: which problem, how it is discretized, and how the
/// solve is controlled. flex holds either one uniform value or one value per
/// sub-interval.
struct ExperimentConfig {
  std::string problem = "bryson-denham";
  std::string mode = "c";  // a: sample points, b: Bernstein fixed, c: flexible
  int degree = 3;
  int intervals = 3;
  std::vector<double> flex = {0.5};
  double tol = 1e-8;
  int max_iter = 2000;
  unsigned seed = 0;
  int jobs = 1;            // concurrent sweep points
  std::string out;         // output path stem; empty writes no files
  std::string format = "csv";  // csv | json

  /// Flexibility of sub-interval i.
  double flex_at(int i) const;
  void validate() const;  // throws std::invalid_argument
};

/// Self-describing outcome of one run: the config echoed back, solver
/// diagnostics, assessment metrics, the resolved mesh, and dense trajectory
/// samples (200 per sub-interval) for plotting.
struct ResultRecord {
  ExperimentConfig config;
  std::string status;  // converged | max_iter | infeasible | error
  int iterations = 0;
  double wall_time_s = 0.0;
  double kkt_residual = 0.0;
  double objective = 0.0;  // discrete objective reported by the solver
  assessment::AssessmentReport report;
  std::vector<double> breakpoints;
  std::vector<double> sample_times;
  std::vector<std::vector<double>> sample_states;  // one series per state
  std::vector<std::vector<double>> sample_inputs;  // one series per input

  bool converged() const { return status == "converged"; }
};

/// Solves one configured point. Retries from 3 seed-derived perturbed
/// initial guesses when the nominal solve does not converge, keeping the
/// first converged result, else the attempt with the smallest KKT residual.
/// For "sine-approx" the report carries the continuous L2 approximation
/// error as cost and the continuous bound overshoot as inequality
/// violation. Throws std::invalid_argument for unknown configs.
ResultRecord run(const ExperimentConfig& config);

/// Runs one point per value of the swept axis ("degree" or "flexibility"),
/// concurrently up to config.jobs. Unconverged points are retried once,
/// warm-started from the nearest converged neighbour (continuation), which
/// keeps results independent of completion order. Records are ordered by
/// value; failed points are recorded, not dropped.
std::vector<ResultRecord> sweep(const ExperimentConfig& base,
                                const std::string& axis,
                                std::vector<double> values);

/// Writes records as CSV: config columns first, then metrics, one row per
/// record, breakpoints joined by ';' in a single column.
void emit_csv(const std::vector<ResultRecord>& records, const std::string& path);

/// Writes records as a JSON array, one object per record, including the
/// per-interval metrics and the dense samples.
void emit_json(const std::vector<ResultRecord>& records, const std::string& path);

/// Parses a file produced by emit_json.
std::vector<ResultRecord> parse_json(const std::string& path);

/// Writes records to <out>.<format> per config.format and the trajectory of
/// each record to the sibling <out>.traj.csv (run) or <out>.<index>.traj.csv
/// (sweep). No-op when config.out is empty.
void write_outputs(const std::vector<ResultRecord>& records,
                   const ExperimentConfig& config);

/// Writes the dense samples as CSV with columns t, x_1..x_{n_x}, u_1..u_{n_u},
/// 200 rows per sub-interval, preceded by '#' metadata lines (problem,
/// degree, breakpoints) sufficient to reload the exact trajectory.
void write_trajectory(const ResultRecord& record, const std::string& path);

struct SavedTrajectory {
  std::string problem;
  int degree = 0;
  transcription::Trajectory trajectory;
};

/// Reloads a write_trajectory file. The per-interval polynomials are
/// recovered exactly (to round-off) by re-interpolating the samples.
SavedTrajectory load_trajectory(const std::string& path);

/// Re-assesses a saved trajectory against its problem definition.
assessment::AssessmentReport reassess(const SavedTrajectory& saved);

}  // namespace flexcolloc::experiment
