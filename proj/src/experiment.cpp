#include "flexcolloc/experiment.hpp"

#include "flexcolloc/log.hpp"
#include "flexcolloc/problems.hpp"
#include "flexcolloc/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace flexcolloc::experiment {
namespace {

using nlohmann::json;

constexpr int kSamplesPerInterval = 200;
constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& values, char sep) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += fmt(values[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

transcription::ConstraintMode parse_mode(const std::string& mode) {
  if (mode == "a") return transcription::ConstraintMode::SamplePoints;
  if (mode == "b") return transcription::ConstraintMode::BernsteinFixed;
  if (mode == "c") return transcription::ConstraintMode::BernsteinFlexible;
  throw std::invalid_argument("unknown constraint mode '" + mode +
                              "' (expected a, b, or c)");
}

std::string status_name(nlp::SolveStatus s) {
  switch (s) {
    case nlp::SolveStatus::Converged: return "converged";
    case nlp::SolveStatus::MaxIter: return "max_iter";
    case nlp::SolveStatus::Infeasible: return "infeasible";
  }
  return "error";
}

/// Nominal solve, then an optional problem-specific fallback start, then up
/// to three seed-derived perturbed restarts; the first converged attempt
/// wins, otherwise the attempt with the smallest KKT residual.
nlp::NlpSolution multi_start(
    const nlp::NlpProblem& p, const Eigen::VectorXd& z0,
    const ExperimentConfig& cfg,
    const std::function<bool(Eigen::VectorXd&)>& fallback = {}) {
  nlp::SolverOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  nlp::NlpProblem attempt = p;
  attempt.z0 = z0;
  nlp::NlpSolution best = nlp::solve(attempt, opts);
  const auto keep_better = [&best](nlp::NlpSolution sol) {
    if (sol.status == nlp::SolveStatus::Converged ||
        sol.kkt_residual < best.kkt_residual)
      best = std::move(sol);
  };
  if (best.status != nlp::SolveStatus::Converged && fallback &&
      fallback(attempt.z0))
    keep_better(nlp::solve(attempt, opts));
  for (unsigned retry = 1; retry <= 3; ++retry) {
    if (best.status == nlp::SolveStatus::Converged) break;
    logging::info("restart " + std::to_string(retry) + " (status " +
                  status_name(best.status) + ", kkt " + fmt(best.kkt_residual) +
                  ")");
    std::mt19937 rng(cfg.seed * 1000003u + retry);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    attempt.z0 = z0;
    for (Eigen::Index i = 0; i < z0.size(); ++i)
      attempt.z0(i) += 0.05 * (1.0 + std::abs(z0(i))) * unit(rng);
    keep_better(nlp::solve(attempt, opts));
  }
  return best;
}

void fill_solver_fields(ResultRecord& rec, const nlp::NlpSolution& sol) {
  rec.status = status_name(sol.status);
  rec.iterations = sol.iterations;
  rec.kkt_residual = sol.kkt_residual;
  rec.objective = sol.objective;
}

/// Dense per-interval samples; the evaluator receives the interval and a
/// time strictly associated with it, so input discontinuities at interior
/// breakpoints resolve to the owning interval's polynomial.
void fill_samples(const std::vector<double>& bp,
                  const std::function<void(int, double, std::vector<double>&,
                                           std::vector<double>&)>& eval,
                  ResultRecord& rec) {
  std::vector<double> x, u;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    for (int j = 0; j < kSamplesPerInterval; ++j) {
      const double s = static_cast<double>(j) / (kSamplesPerInterval - 1);
      const double t = bp[i] + s * (bp[i + 1] - bp[i]);
      eval(static_cast<int>(i), t, x, u);
      rec.sample_times.push_back(t);
      if (rec.sample_states.size() < x.size()) rec.sample_states.resize(x.size());
      if (rec.sample_inputs.size() < u.size()) rec.sample_inputs.resize(u.size());
      for (size_t k = 0; k < x.size(); ++k) rec.sample_states[k].push_back(x[k]);
      for (size_t k = 0; k < u.size(); ++k) rec.sample_inputs[k].push_back(u[k]);
    }
  }
}

/// Continuous metrics of a scalar fit f against sin(2 pi t): cost is the L2
/// distance, inequality_violation the L2 overshoot of the [-1, 1] band.
assessment::AssessmentReport sine_report(const std::function<double(double)>& f,
                                         const std::vector<double>& bp,
                                         bool bounded) {
  assessment::AssessmentReport rep;
  double cost_sq = 0.0;
  double ineq_sq = 0.0;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    const auto err = quadrature::integrate_adaptive(
        [&](double t) {
          const double d = f(t) - std::sin(2.0 * kPi * t);
          return d * d;
        },
        bp[i], bp[i + 1]);
    rep.cost_per_interval.push_back(std::sqrt(std::max(0.0, err.value)));
    cost_sq += err.value;
    double viol = 0.0;
    if (bounded) {
      viol = quadrature::integrate_adaptive(
                 [&](double t) {
                   const double d = assessment::violation(f(t), -1.0, 1.0);
                   return d * d;
                 },
                 bp[i], bp[i + 1])
                 .value;
    }
    rep.inequality_per_interval.push_back(std::sqrt(std::max(0.0, viol)));
    ineq_sq += viol;
    rep.dynamic_per_interval.push_back(0.0);
  }
  rep.cost = std::sqrt(std::max(0.0, cost_sq));
  rep.inequality_violation = std::sqrt(std::max(0.0, ineq_sq));
  rep.dynamic_violation = 0.0;
  return rep;
}

bool sine_flexible(const ExperimentConfig& cfg) {
  if (cfg.mode == "c") return true;
  if (cfg.mode != "a") return false;
  for (double phi : cfg.flex)
    if (phi > 0.0) return true;
  return false;
}

bool sine_bounded(const ExperimentConfig& cfg) { return cfg.mode != "a"; }

transcription::FlexibleMesh make_mesh(const ExperimentConfig& cfg,
                                      const transcription::DopDefinition& dop) {
  transcription::FlexibleMesh mesh = transcription::FlexibleMesh::uniform(
      dop.t0, dop.tf, cfg.intervals, cfg.flex_at(0));
  for (int i = 0; i < cfg.intervals; ++i) mesh.phi[i] = cfg.flex_at(i);
  return mesh;
}

/// Solves one point; init, when given, replaces the problem's own initial
/// guess. z_out receives the final iterate for continuation.
ResultRecord run_impl(const ExperimentConfig& cfg, const Eigen::VectorXd* init,
                      Eigen::VectorXd* z_out) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.config = cfg;
  if (cfg.problem == "sine-approx") {
    const problems::SineApproximation sine = problems::sine_approximation(
        cfg.degree, sine_flexible(cfg), sine_bounded(cfg));
    const nlp::NlpSolution sol =
        multi_start(sine.nlp, init != nullptr ? *init : sine.nlp.z0, cfg);
    fill_solver_fields(rec, sol);
    rec.breakpoints = sine.breakpoints(sol.z);
    const Eigen::VectorXd z = sol.z;
    rec.report = sine_report([&](double t) { return sine.evaluate(z, t); },
                             rec.breakpoints, sine.bounded);
    // Pieces are discontinuous at the breakpoints, so boundary rows must be
    // evaluated on the owning piece, not through the global left-closed map.
    std::vector<double> piece(sine.n_p + 1);
    fill_samples(rec.breakpoints,
                 [&](int i, double t, std::vector<double>& x, std::vector<double>& u) {
                   const double a = rec.breakpoints[i];
                   const double h = rec.breakpoints[i + 1] - a;
                   const double tau = 2.0 * (t - a) / h - 1.0;
                   for (int j = 0; j <= sine.n_p; ++j)
                     piece[j] = z(sine.sample_index(i, j));
                   x.assign(1, quadrature::interpolate(sine.sample_grid, piece, tau));
                   u.clear();
                 },
                 rec);
    if (z_out != nullptr) *z_out = sol.z;
  } else {
    const transcription::DopDefinition dop = problems::make_dop(cfg.problem);
    const transcription::TranscribedProblem tp = transcription::assemble(
        dop, cfg.degree, make_mesh(cfg, dop), parse_mode(cfg.mode));
    // A stalled flexible solve restarts from the fixed-mesh optimum before
    // falling back to random perturbations; moving breakpoints couple badly
    // with a cold trajectory guess.
    std::function<bool(Eigen::VectorXd&)> cascade;
    if (tp.layout.mode == transcription::ConstraintMode::BernsteinFlexible) {
      cascade = [&](Eigen::VectorXd& guess) {
        logging::info("warm starting the flexible mesh from the fixed mesh");
        const transcription::TranscribedProblem fixed = transcription::assemble(
            dop, cfg.degree, make_mesh(cfg, dop),
            transcription::ConstraintMode::BernsteinFixed);
        nlp::SolverOptions opts;
        opts.tol = cfg.tol;
        opts.max_iter = cfg.max_iter;
        const nlp::NlpSolution sol_fixed = nlp::solve(fixed.nlp, opts);
        if (sol_fixed.status != nlp::SolveStatus::Converged) return false;
        guess = transcription::resample(
            tp.layout,
            transcription::extract_trajectory(fixed.layout, sol_fixed.z));
        return true;
      };
    }
    const nlp::NlpSolution sol =
        multi_start(tp.nlp, init != nullptr ? *init : tp.nlp.z0, cfg, cascade);
    fill_solver_fields(rec, sol);
    const transcription::Trajectory traj =
        transcription::extract_trajectory(tp.layout, sol.z);
    rec.breakpoints = traj.breakpoints;
    try {
      rec.report = assessment::assess(traj, dop);
    } catch (const std::exception&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rec.report = {};
      rec.report.cost = nan;
      rec.report.inequality_violation = nan;
      rec.report.dynamic_violation = nan;
    }
    fill_samples(rec.breakpoints,
                 [&](int i, double t, std::vector<double>& x, std::vector<double>& u) {
                   const double h = traj.breakpoints[i + 1] - traj.breakpoints[i];
                   const double tau = 2.0 * (t - traj.breakpoints[i]) / h - 1.0;
                   x.resize(tp.layout.n_x);
                   u.resize(tp.layout.n_u);
                   for (int k = 0; k < tp.layout.n_x; ++k) {
                     const auto col = traj.states[i].col(k);
                     x[k] = quadrature::interpolate(
                         traj.sgrid, std::span<const double>(col.data(), col.size()),
                         tau);
                   }
                   for (int k = 0; k < tp.layout.n_u; ++k) {
                     const auto col = traj.inputs[i].col(k);
                     u[k] = quadrature::interpolate(
                         traj.ugrid, std::span<const double>(col.data(), col.size()),
                         tau);
                   }
                 },
                 rec);
    if (z_out != nullptr) *z_out = sol.z;
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  logging::info(cfg.problem + " mode " + cfg.mode + " n " +
                std::to_string(cfg.degree) + ": " + rec.status + " after " +
                std::to_string(rec.iterations) + " iterations, cost " +
                fmt(rec.report.cost));
  return rec;
}

/// Warm start for `to` taken from a solved point `from`.
Eigen::VectorXd continuation_guess(const ExperimentConfig& to,
                                   const ExperimentConfig& from,
                                   const Eigen::VectorXd& z_from) {
  if (to.problem == "sine-approx") {
    const problems::SineApproximation donor = problems::sine_approximation(
        from.degree, sine_flexible(from), sine_bounded(from));
    const problems::SineApproximation target = problems::sine_approximation(
        to.degree, sine_flexible(to), sine_bounded(to));
    std::vector<double> bp =
        target.flexible ? donor.breakpoints(z_from) : target.nominal;
    Eigen::VectorXd z = target.nlp.z0;
    for (int i = 0; i < 3; ++i) {
      const double a = bp[i];
      const double h = bp[i + 1] - bp[i];
      for (int j = 0; j <= target.n_p; ++j) {
        const double t = a + 0.5 * (target.sample_grid.points[j] + 1.0) * h;
        z(target.sample_index(i, j)) = donor.evaluate(z_from, t);
      }
    }
    if (target.flexible)
      for (int i = 1; i < 3; ++i) z(target.mesh_index(i - 1)) = bp[i];
    return z;
  }
  const transcription::DopDefinition dop = problems::make_dop(to.problem);
  const transcription::DecisionLayout donor =
      transcription::assemble(dop, from.degree, make_mesh(from, dop),
                              parse_mode(from.mode))
          .layout;
  const transcription::DecisionLayout target =
      transcription::assemble(dop, to.degree, make_mesh(to, dop),
                              parse_mode(to.mode))
          .layout;
  return transcription::resample(target,
                                 transcription::extract_trajectory(donor, z_from));
}

json record_to_json(const ResultRecord& r) {
  json j;
  j["config"] = {{"problem", r.config.problem}, {"mode", r.config.mode},
                 {"degree", r.config.degree},   {"intervals", r.config.intervals},
                 {"flex", r.config.flex},       {"tol", r.config.tol},
                 {"max_iter", r.config.max_iter}, {"seed", r.config.seed},
                 {"jobs", r.config.jobs},       {"out", r.config.out},
                 {"format", r.config.format}};
  j["status"] = r.status;
  j["iterations"] = r.iterations;
  j["wall_time_s"] = r.wall_time_s;
  j["kkt_residual"] = r.kkt_residual;
  j["objective"] = r.objective;
  j["report"] = {{"cost", r.report.cost},
                 {"inequality_violation", r.report.inequality_violation},
                 {"dynamic_violation", r.report.dynamic_violation},
                 {"cost_per_interval", r.report.cost_per_interval},
                 {"inequality_per_interval", r.report.inequality_per_interval},
                 {"dynamic_per_interval", r.report.dynamic_per_interval}};
  j["breakpoints"] = r.breakpoints;
  j["samples"] = {{"t", r.sample_times},
                  {"states", r.sample_states},
                  {"inputs", r.sample_inputs}};
  return j;
}

double json_double(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                     : v.get<double>();
}

ResultRecord record_from_json(const json& j) {
  ResultRecord r;
  const json& c = j.at("config");
  r.config.problem = c.at("problem").get<std::string>();
  r.config.mode = c.at("mode").get<std::string>();
  r.config.degree = c.at("degree").get<int>();
  r.config.intervals = c.at("intervals").get<int>();
  r.config.flex = c.at("flex").get<std::vector<double>>();
  r.config.tol = json_double(c.at("tol"));
  r.config.max_iter = c.at("max_iter").get<int>();
  r.config.seed = c.at("seed").get<unsigned>();
  r.config.jobs = c.at("jobs").get<int>();
  r.config.out = c.at("out").get<std::string>();
  r.config.format = c.at("format").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.iterations = j.at("iterations").get<int>();
  r.wall_time_s = json_double(j.at("wall_time_s"));
  r.kkt_residual = json_double(j.at("kkt_residual"));
  r.objective = json_double(j.at("objective"));
  const json& rep = j.at("report");
  r.report.cost = json_double(rep.at("cost"));
  r.report.inequality_violation = json_double(rep.at("inequality_violation"));
  r.report.dynamic_violation = json_double(rep.at("dynamic_violation"));
  r.report.cost_per_interval = rep.at("cost_per_interval").get<std::vector<double>>();
  r.report.inequality_per_interval =
      rep.at("inequality_per_interval").get<std::vector<double>>();
  r.report.dynamic_per_interval =
      rep.at("dynamic_per_interval").get<std::vector<double>>();
  r.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  const json& s = j.at("samples");
  r.sample_times = s.at("t").get<std::vector<double>>();
  r.sample_states = s.at("states").get<std::vector<std::vector<double>>>();
  r.sample_inputs = s.at("inputs").get<std::vector<std::vector<double>>>();
  return r;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

double ExperimentConfig::flex_at(int i) const {
  return flex.size() == 1 ? flex[0] : flex[static_cast<size_t>(i)];
}

void ExperimentConfig::validate() const {
  const auto& names = problems::problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end())
    throw std::invalid_argument("unknown problem '" + problem + "'");
  parse_mode(mode);
  if (degree < 1) throw std::invalid_argument("degree must be at least 1");
  if (intervals < 1) throw std::invalid_argument("intervals must be at least 1");
  if (problem == "sine-approx" && intervals != 3)
    throw std::invalid_argument("sine-approx uses exactly 3 intervals");
  if (flex.empty() || (flex.size() != 1 &&
                       flex.size() != static_cast<size_t>(intervals)))
    throw std::invalid_argument(
        "flex needs one uniform value or one value per interval");
  for (double phi : flex)
    if (!(phi >= 0.0 && phi < 1.0))
      throw std::invalid_argument("flexibility must lie in [0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
}

ResultRecord run(const ExperimentConfig& config) {
  return run_impl(config, nullptr, nullptr);
}

std::vector<ResultRecord> sweep(const ExperimentConfig& base,
                                const std::string& axis,
                                std::vector<double> values) {
  if (axis != "degree" && axis != "flexibility")
    throw std::invalid_argument("sweep axis must be 'degree' or 'flexibility'");
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::sort(values.begin(), values.end());
  const auto point_config = [&](double v) {
    ExperimentConfig c = base;
    if (axis == "degree") {
      c.degree = static_cast<int>(std::llround(v));
      if (std::abs(v - c.degree) > 1e-9)
        throw std::invalid_argument("degree sweep values must be integers");
    } else {
      c.flex = {v};
    }
    return c;
  };
  for (double v : values) point_config(v).validate();

  const int m = static_cast<int>(values.size());
  std::vector<ResultRecord> records(m);
  std::vector<Eigen::VectorXd> iterates(m);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, base.jobs))
  for (int i = 0; i < m; ++i) {
    try {
      records[i] = run_impl(point_config(values[i]), nullptr, &iterates[i]);
    } catch (const std::exception& e) {
      records[i].config = point_config(values[i]);
      records[i].status = "error";
      logging::info("sweep point " + fmt(values[i]) + " failed: " + e.what());
    }
  }

  // One serial continuation pass in axis order: unconverged points restart
  // from the nearest converged neighbour, so the outcome does not depend on
  // how the parallel phase interleaved.
  for (int i = 0; i < m; ++i) {
    if (records[i].converged()) continue;
    int donor = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const double d = std::abs(values[j] - values[i]);
      if (records[j].converged() && iterates[j].size() > 0 && d < best) {
        donor = j;
        best = d;
      }
    }
    if (donor < 0) continue;
    try {
      const Eigen::VectorXd guess = continuation_guess(
          records[i].config, records[donor].config, iterates[donor]);
      Eigen::VectorXd z;
      ResultRecord retry = run_impl(records[i].config, &guess, &z);
      if (retry.converged() || records[i].status == "error" ||
          retry.kkt_residual < records[i].kkt_residual) {
        records[i] = std::move(retry);
        iterates[i] = std::move(z);
      }
    } catch (const std::exception& e) {
      logging::info("continuation retry failed: " + std::string(e.what()));
    }
  }
  return records;
}

void emit_csv(const std::vector<ResultRecord>& records, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "problem,mode,degree,intervals,flex,tol,seed,status,iterations,"
         "wall_time_s,kkt_residual,objective,cost,inequality_violation,"
         "dynamic_violation,breakpoints\n";
  for (const ResultRecord& r : records) {
    out << r.config.problem << ',' << r.config.mode << ',' << r.config.degree
        << ',' << r.config.intervals << ',' << join(r.config.flex, ';') << ','
        << fmt(r.config.tol) << ',' << r.config.seed << ',' << r.status << ','
        << r.iterations << ',' << fmt(r.wall_time_s) << ','
        << fmt(r.kkt_residual) << ',' << fmt(r.objective) << ','
        << fmt(r.report.cost) << ',' << fmt(r.report.inequality_violation)
        << ',' << fmt(r.report.dynamic_violation) << ','
        << join(r.breakpoints, ';') << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void emit_json(const std::vector<ResultRecord>& records, const std::string& path) {
  json j = json::array();
  for (const ResultRecord& r : records) j.push_back(record_to_json(r));
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<ResultRecord> parse_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  in >> j;
  std::vector<ResultRecord> records;
  for (const json& item : j) records.push_back(record_from_json(item));
  return records;
}

void write_trajectory(const ResultRecord& record, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# problem = " << record.config.problem << '\n';
  out << "# degree = " << record.config.degree << '\n';
  out << "# breakpoints = " << join(record.breakpoints, ';') << '\n';
  out << 't';
  for (size_t k = 0; k < record.sample_states.size(); ++k)
    out << ",x_" << k + 1;
  for (size_t k = 0; k < record.sample_inputs.size(); ++k)
    out << ",u_" << k + 1;
  out << '\n';
  for (size_t row = 0; row < record.sample_times.size(); ++row) {
    out << fmt(record.sample_times[row]);
    for (const auto& series : record.sample_states) out << ',' << fmt(series[row]);
    for (const auto& series : record.sample_inputs) out << ',' << fmt(series[row]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

SavedTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  SavedTrajectory saved;
  std::vector<double> bp;
  std::string line;
  int n_x = 0;
  int n_u = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      std::string value = line.substr(eq + 1);
      const auto strip = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
      };
      strip(key);
      strip(value);
      if (key == "problem") saved.problem = value;
      if (key == "degree") saved.degree = std::stoi(value);
      if (key == "breakpoints") bp = split_doubles(value, ';');
      continue;
    }
    // Column header: count the state and input series.
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.rfind("x_", 0) == 0) ++n_x;
      if (name.rfind("u_", 0) == 0) ++n_u;
    }
    break;
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row = split_doubles(line, ',');
    if (static_cast<int>(row.size()) != 1 + n_x + n_u)
      throw std::runtime_error("malformed trajectory row in '" + path + "'");
    rows.push_back(std::move(row));
  }
  const int n = saved.degree;
  if (bp.size() < 2 || n < 1)
    throw std::runtime_error("trajectory file '" + path + "' lacks metadata");
  const int n_h = static_cast<int>(bp.size()) - 1;
  if (static_cast<int>(rows.size()) != n_h * kSamplesPerInterval)
    throw std::runtime_error("trajectory row count does not match breakpoints");
  if (n + 1 > kSamplesPerInterval)
    throw std::runtime_error("trajectory samples cannot resolve degree " +
                             std::to_string(n));

  // Chebyshev-spread row indices: any n+1 distinct samples of a degree-n
  // polynomial pin it down; the spread keeps the interpolation conditioned.
  const auto spread = [](int count) {
    std::vector<int> idx(count);
    for (int k = 0; k < count; ++k) {
      const double s = count == 1 ? 0.5
                                  : 0.5 * (1.0 - std::cos(kPi * k / (count - 1)));
      idx[k] = static_cast<int>(std::llround(s * (kSamplesPerInterval - 1)));
      if (k > 0) idx[k] = std::max(idx[k], idx[k - 1] + 1);
    }
    for (int k = count - 2; k >= 0; --k)
      idx[k] = std::min(idx[k], idx[k + 1] - 1);
    return idx;
  };
  const auto tau_of = [](int idx) {
    return -1.0 + 2.0 * idx / (kSamplesPerInterval - 1);
  };
  const std::vector<int> sidx = spread(n + 1);
  const std::vector<int> uidx = spread(n);
  std::vector<double> staus, utaus;
  for (int idx : sidx) staus.push_back(tau_of(idx));
  for (int idx : uidx) utaus.push_back(tau_of(idx));
  const quadrature::InterpolationGrid sfit = quadrature::make_grid(staus);
  const quadrature::InterpolationGrid ufit = quadrature::make_grid(utaus);

  transcription::Trajectory traj;
  traj.t0 = bp.front();
  traj.tf = bp.back();
  traj.breakpoints = bp;
  traj.sgrid = quadrature::state_grid(n);
  traj.ugrid = quadrature::input_grid(n);
  std::vector<double> vals;
  for (int i = 0; i < n_h; ++i) {
    const int base = i * kSamplesPerInterval;
    Eigen::MatrixXd states(n + 1, n_x);
    for (int k = 0; k < n_x; ++k) {
      vals.clear();
      for (int idx : sidx) vals.push_back(rows[base + idx][1 + k]);
      for (int j = 0; j <= n; ++j)
        states(j, k) = quadrature::interpolate(sfit, vals, traj.sgrid.points[j]);
    }
    Eigen::MatrixXd inputs(n, n_u);
    for (int k = 0; k < n_u; ++k) {
      vals.clear();
      for (int idx : uidx) vals.push_back(rows[base + idx][1 + n_x + k]);
      for (int j = 0; j < n; ++j)
        inputs(j, k) = quadrature::interpolate(ufit, vals, traj.ugrid.points[j]);
    }
    traj.states.push_back(std::move(states));
    traj.inputs.push_back(std::move(inputs));
  }
  saved.trajectory = std::move(traj);
  return saved;
}

void write_outputs(const std::vector<ResultRecord>& records,
                   const ExperimentConfig& config) {
  if (config.out.empty() || records.empty()) return;
  const std::string table = config.out + "." + config.format;
  if (config.format == "json")
    emit_json(records, table);
  else
    emit_csv(records, table);
  logging::info("wrote " + table);
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].sample_times.empty()) continue;
    std::string path = config.out;
    if (records.size() > 1) path += "." + std::to_string(i);
    path += ".traj.csv";
    write_trajectory(records[i], path);
  }
}

assessment::AssessmentReport reassess(const SavedTrajectory& saved) {
  if (saved.problem == "sine-approx") {
    const transcription::Trajectory& traj = saved.trajectory;
    return sine_report([&](double t) { return traj.state(t)(0); },
                       traj.breakpoints, true);
  }
  return assessment::assess(saved.trajectory,
                            problems::make_dop(saved.problem));
}

}  // namespace flexcolloc::experiment
