#pragma once

#include "flexcolloc/bernstein.hpp"
#include "flexcolloc/nlp.hpp"
#include "flexcolloc/transcription.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flexcolloc::problems {

/// Double integrator on [0, 1]: position r, velocity v, acceleration input.
/// r(0) = 0, v(0) = 1, r(1) = 0, v(1) = -1, r <= 0.2, cost integral of u^2/2.
transcription::DopDefinition bryson_denham();

/// Path bound on the position state.
constexpr double kBrysonDenhamBound = 0.2;

/// Optimal cost from a fine-mesh flexible solve (degree 12, 16 sub-intervals),
/// memoized after the first call.
double bryson_denham_reference_cost();

/// Physical constants of the cart-pole swing-up task.
struct CartPoleConstants {
  double cart_mass = 1.0;     // kg
  double pole_mass = 0.3;     // kg
  double pole_length = 0.5;   // m
  double gravity = 9.81;      // m/s^2
  double horizon = 2.0;       // s
  double distance = 1.0;      // m, target cart displacement
  double max_force = 20.0;    // N
  double track_min = 0.0;     // m
  double track_max = 1.0;     // m
};
const CartPoleConstants& cart_pole_constants();

/// Swing-up: states (q1 cart position, q2 pole angle, their rates), force
/// input, rest at the origin to inverted at distance, 0 <= q1 <= 1,
/// |u| <= max force, cost integral of u^2.
transcription::DopDefinition cart_pole();

/// Cart-pole state derivative, shared with simulation-based tests.
Eigen::Vector4d cart_pole_rhs(const Eigen::Vector4d& x, double u);

/// Total mechanical energy of the cart-pole.
double cart_pole_energy(const Eigen::Vector4d& x);

/// Least-squares fit of sin(2 pi t) on [0, 1] by three independent
/// polynomial pieces of degree n_p sampled at LGL points, objective summed
/// over LGL points of order n_p + 2. With bounded = true the Bernstein
/// coefficients of every piece are constrained to [-1, 1]; with flexible =
/// true the two interior breakpoints are decision variables (phi = 0.5).
struct SineApproximation {
  nlp::NlpProblem nlp;
  int n_p = 0;
  bool flexible = false;
  bool bounded = false;
  std::vector<double> nominal;          // 4 breakpoints
  quadrature::InterpolationGrid sample_grid;

  int sample_index(int interval, int j) const { return interval * (n_p + 1) + j; }
  int mesh_index(int interior) const { return 3 * (n_p + 1) + interior; }

  std::vector<double> breakpoints(const Eigen::VectorXd& z) const;
  double evaluate(const Eigen::VectorXd& z, double t) const;
  /// L2 distance between the fit and sin(2 pi t), by adaptive quadrature.
  double l2_error(const Eigen::VectorXd& z) const;
};
SineApproximation sine_approximation(int n_p, bool flexible, bool bounded = true);

/// Two monotone interpolation fixtures on [-1, 1] whose hull bounds are not
/// tight there: a cubic through {1.0, 0.4, -0.2, -1.0} and a degree-8
/// polynomial through {-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.8, 1.0},
/// both taken at state interpolation points (LGR nodes plus the right
/// endpoint) of matching count.
std::pair<bernstein::Polynomial, bernstein::Polynomial> monotone_interpolants();

/// Names accepted by the experiment runner.
const std::vector<std::string>& problem_names();

/// Dynamic-optimization problems by name ("bryson-denham" or "cart-pole").
/// Throws std::invalid_argument for unknown names and for "sine-approx",
/// which is not posed as a DopDefinition.
transcription::DopDefinition make_dop(const std::string& name);

}  // namespace flexcolloc::problems
