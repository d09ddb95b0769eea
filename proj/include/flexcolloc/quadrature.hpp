#pragma once

#include <Eigen/Core>

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace flexcolloc::quadrature {

enum class NodeKind { LGR, LGL };

/// Quadrature nodes on [-1, 1] with positive weights summing to 2.
struct NodeSet {
  NodeKind kind;
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;
};

/// Legendre-Gauss-Radau rule with n points, the left endpoint -1 included.
/// Interior nodes are the roots of P_{n-1} + P_n. Exact for polynomials of
/// degree <= 2n-2.
NodeSet lgr_nodes(int n);

/// Legendre-Gauss-Lobatto rule with m >= 2 points including both endpoints.
/// Exact for polynomials of degree <= 2m-3.
NodeSet lgl_nodes(int m);

/// Value and derivative of the Legendre polynomial P_n at x.
std::pair<double, double> legendre(int n, double x);

/// Interpolation points with barycentric weights and the spectral
/// differentiation matrix. diff * samples(q) == samples(q') exactly (to
/// round-off) for polynomials q of degree <= points.size()-1.
struct InterpolationGrid {
  std::vector<double> points;
  std::vector<double> bary;
  Eigen::MatrixXd diff;

  int size() const { return static_cast<int>(points.size()); }
};

InterpolationGrid make_grid(std::vector<double> points);

/// The n+1 state interpolation points: the n LGR nodes plus +1.
InterpolationGrid state_grid(int n);

/// The n input interpolation points: the LGR nodes themselves.
InterpolationGrid input_grid(int n);

/// Barycentric Lagrange evaluation of the interpolant through
/// (points[j], values[j]) at tau. Exact at the grid points.
double interpolate(const InterpolationGrid& grid, std::span<const double> values,
                   double tau);

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;   // estimated bound on |value - exact|
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7-15 pair) integration of f over [a, b].
/// Splits the worst sub-interval until the summed error estimate meets
/// max(abs_tol, rel_tol * |value|). Throws std::runtime_error if max_splits
/// bisections do not suffice.
IntegralResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double rel_tol = 1e-10,
                                  double abs_tol = 1e-12, int max_splits = 10000);

}  // namespace flexcolloc::quadrature
