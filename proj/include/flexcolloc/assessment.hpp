#pragma once

#include "flexcolloc/transcription.hpp"

#include <vector>

namespace flexcolloc::assessment {

/// Distance of y below [y_lower] or above [y_upper]; zero inside the box.
double violation(double y, double y_lower, double y_upper);

/// Solution-quality metrics of a piecewise-polynomial trajectory against the
/// continuous-time problem, all computed by adaptive quadrature.
///
/// cost             boundary cost plus the integral of the running cost
/// inequality_violation  sum over bounded input and state components of the
///                       L2 norm of the box violation over the horizon
/// dynamic_violation     average over state components of the L2 norm of the
///                       dynamics residual along the trajectory
///
/// Per-interval entries apply the same formulas restricted to one
/// sub-interval; norms are not additive, so they do not sum to the totals
/// (the cost entries do, up to the boundary term).
struct AssessmentReport {
  double cost = 0.0;
  double inequality_violation = 0.0;
  double dynamic_violation = 0.0;
  std::vector<double> cost_per_interval;
  std::vector<double> inequality_per_interval;
  std::vector<double> dynamic_per_interval;
};

struct QuadratureTolerance {
  double rel = 1e-10;
  double abs = 1e-12;
};

/// Integrates per sub-interval (breakpoints are kink locations) and combines
/// in index order. Residual integrals stay clear of the breakpoints by
/// 1e-14 of the horizon, where the derivative may jump. Problem callbacks
/// must be safe to call concurrently; sub-interval integrals run under
/// OpenMP. Throws std::runtime_error if the quadrature does not converge.
AssessmentReport assess(const transcription::Trajectory& traj,
                        const transcription::DopDefinition& dop,
                        QuadratureTolerance tol = {});

/// Single-threaded reference with identical results.
AssessmentReport assess_serial(const transcription::Trajectory& traj,
                               const transcription::DopDefinition& dop,
                               QuadratureTolerance tol = {});

}  // namespace flexcolloc::assessment
