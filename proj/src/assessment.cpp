#include "flexcolloc/assessment.hpp"

#include "flexcolloc/nlp.hpp"
#include "flexcolloc/quadrature.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace flexcolloc::assessment {

namespace {

bool bounded(double lo, double hi) {
  return lo > -nlp::kUnbounded || hi < nlp::kUnbounded;
}

struct Task {
  std::function<double()> integral;
  double* destination;
};

AssessmentReport assess_impl(const transcription::Trajectory& traj,
                             const transcription::DopDefinition& dop,
                             QuadratureTolerance tol, bool parallel) {
  const int n_h = traj.intervals();
  const int n_x = dop.n_x;
  const int n_u = dop.n_u;
  const double nudge = 1e-14 * (traj.tf - traj.t0);

  // squared-norm contributions, one slot per (component, interval)
  std::vector<double> cost_part(n_h, 0.0);
  std::vector<std::vector<double>> input_sq(n_u, std::vector<double>(n_h, 0.0));
  std::vector<std::vector<double>> state_sq(n_x, std::vector<double>(n_h, 0.0));
  std::vector<std::vector<double>> residual_sq(n_x, std::vector<double>(n_h, 0.0));

  std::vector<Task> tasks;
  for (int i = 0; i < n_h; ++i) {
    const double a = traj.breakpoints[i];
    const double b = traj.breakpoints[i + 1];
    if (dop.l.value) {
      tasks.push_back({[&, a, b]() {
                         auto f = [&](double t) {
                           Eigen::VectorXd x = traj.state(t);
                           Eigen::VectorXd u = traj.input(t);
                           return dop.l.value(
                               std::span<const double>(x.data(), x.size()),
                               std::span<const double>(u.data(), u.size()), t);
                         };
                         return quadrature::integrate_adaptive(f, a, b, tol.rel,
                                                               tol.abs)
                             .value;
                       },
                       &cost_part[i]});
    }
    for (int c = 0; c < n_u; ++c) {
      if (dop.u_lower.size() == 0 || !bounded(dop.u_lower(c), dop.u_upper(c)))
        continue;
      const double lo = dop.u_lower(c);
      const double hi = dop.u_upper(c);
      tasks.push_back({[&, a, b, c, lo, hi]() {
                         auto f = [&](double t) {
                           const double v = violation(traj.input(t)(c), lo, hi);
                           return v * v;
                         };
                         return quadrature::integrate_adaptive(f, a, b, tol.rel,
                                                               tol.abs)
                             .value;
                       },
                       &input_sq[c][i]});
    }
    for (int k = 0; k < n_x; ++k) {
      if (dop.x_lower.size() == 0 || !bounded(dop.x_lower(k), dop.x_upper(k)))
        continue;
      const double lo = dop.x_lower(k);
      const double hi = dop.x_upper(k);
      tasks.push_back({[&, a, b, k, lo, hi]() {
                         auto f = [&](double t) {
                           const double v = violation(traj.state(t)(k), lo, hi);
                           return v * v;
                         };
                         return quadrature::integrate_adaptive(f, a, b, tol.rel,
                                                               tol.abs)
                             .value;
                       },
                       &state_sq[k][i]});
    }
    for (int k = 0; k < n_x; ++k) {
      tasks.push_back({[&, a, b, k]() {
                         auto f = [&](double t) {
                           Eigen::VectorXd xd = traj.state_derivative(t);
                           Eigen::VectorXd x = traj.state(t);
                           Eigen::VectorXd u = traj.input(t);
                           std::vector<double> r(n_x);
                           dop.r.value(std::span<const double>(xd.data(), n_x),
                                       std::span<const double>(x.data(), n_x),
                                       std::span<const double>(u.data(), n_u), t,
                                       std::span<double>(r.data(), n_x));
                           return r[k] * r[k];
                         };
                         return quadrature::integrate_adaptive(
                                    f, a + nudge, b - nudge, tol.rel, tol.abs)
                             .value;
                       },
                       &residual_sq[k][i]});
    }
  }

  const int n_tasks = static_cast<int>(tasks.size());
  std::vector<std::exception_ptr> failures(n_tasks);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int t = 0; t < n_tasks; ++t) {
    try {
      *tasks[t].destination = tasks[t].integral();
    } catch (...) {
      failures[t] = std::current_exception();
    }
  }
  for (int t = 0; t < n_tasks; ++t)
    if (failures[t]) std::rethrow_exception(failures[t]);

  AssessmentReport report;
  report.cost_per_interval = cost_part;
  report.inequality_per_interval.assign(n_h, 0.0);
  report.dynamic_per_interval.assign(n_h, 0.0);

  double cost = 0.0;
  for (int i = 0; i < n_h; ++i) cost += cost_part[i];
  if (dop.m.value) {
    Eigen::VectorXd x0 = traj.state(traj.t0);
    Eigen::VectorXd xf = traj.state(traj.tf);
    cost += dop.m.value(std::span<const double>(x0.data(), n_x),
                        std::span<const double>(xf.data(), n_x));
  }
  report.cost = cost;

  auto norm_total = [&](const std::vector<double>& sq) {
    double s = 0.0;
    for (double v : sq) s += v;
    return std::sqrt(s);
  };
  for (int c = 0; c < n_u; ++c) {
    report.inequality_violation += norm_total(input_sq[c]);
    for (int i = 0; i < n_h; ++i)
      report.inequality_per_interval[i] += std::sqrt(input_sq[c][i]);
  }
  for (int k = 0; k < n_x; ++k) {
    report.inequality_violation += norm_total(state_sq[k]);
    for (int i = 0; i < n_h; ++i)
      report.inequality_per_interval[i] += std::sqrt(state_sq[k][i]);
  }
  for (int k = 0; k < n_x; ++k) {
    report.dynamic_violation += norm_total(residual_sq[k]) / n_x;
    for (int i = 0; i < n_h; ++i)
      report.dynamic_per_interval[i] += std::sqrt(residual_sq[k][i]) / n_x;
  }
  return report;
}

}  // namespace

double violation(double y, double y_lower, double y_upper) {
  if (y < y_lower) return y_lower - y;
  if (y > y_upper) return y - y_upper;
  return 0.0;
}

AssessmentReport assess(const transcription::Trajectory& traj,
                        const transcription::DopDefinition& dop,
                        QuadratureTolerance tol) {
  return assess_impl(traj, dop, tol, true);
}

AssessmentReport assess_serial(const transcription::Trajectory& traj,
                               const transcription::DopDefinition& dop,
                               QuadratureTolerance tol) {
  return assess_impl(traj, dop, tol, false);
}

}  // namespace flexcolloc::assessment
