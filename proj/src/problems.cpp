#include "flexcolloc/problems.hpp"

#include "flexcolloc/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>

namespace flexcolloc::problems {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
void cart_pole_residual(std::span<const T> xd, std::span<const T> x,
                        std::span<const T> u, std::span<T> out) {
  const CartPoleConstants& k = cart_pole_constants();
  using std::cos;
  using std::sin;
  const T s = sin(x[1]);
  const T c = cos(x[1]);
  const T denom = k.cart_mass + k.pole_mass * s * s;
  const T a1 = (k.pole_length * k.pole_mass * s * x[3] * x[3] + u[0] +
                k.pole_mass * k.gravity * c * s) /
               denom;
  const T a2 = (k.pole_length * k.pole_mass * c * s * x[3] * x[3] + u[0] * c +
                (k.cart_mass + k.pole_mass) * k.gravity * s) /
               (-k.pole_length * denom);
  out[0] = xd[0] - x[2];
  out[1] = xd[1] - x[3];
  out[2] = xd[2] - a1;
  out[3] = xd[3] - a2;
}

bernstein::Polynomial interpolate_monomial(const std::vector<double>& nodes,
                                           const std::vector<double>& values) {
  const int m = static_cast<int>(nodes.size());
  Eigen::MatrixXd vandermonde(m, m);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    double p = 1.0;
    for (int c = 0; c < m; ++c) {
      vandermonde(r, c) = p;
      p *= nodes[r];
    }
    rhs(r) = values[r];
  }
  Eigen::VectorXd a = vandermonde.fullPivLu().solve(rhs);
  return bernstein::Polynomial(std::vector<double>(a.data(), a.data() + m));
}

}  // namespace

transcription::DopDefinition bryson_denham() {
  transcription::DopDefinition dop;
  dop.n_x = 2;
  dop.n_u = 1;
  dop.t0 = 0.0;
  dop.tf = 1.0;
  dop.l = transcription::make_running_cost(
      [](auto, auto u, const auto&) { return 0.5 * u[0] * u[0]; });
  dop.b = transcription::make_boundary_condition(
      4, [](auto x0, auto xf, auto out) {
        out[0] = x0[0];
        out[1] = x0[1] - 1.0;
        out[2] = xf[0];
        out[3] = xf[1] + 1.0;
      });
  dop.r = transcription::make_dynamics(
      2, [](auto xd, auto x, auto u, const auto&, auto out) {
        out[0] = xd[0] - x[1];
        out[1] = xd[1] - u[0];
      });
  dop.x_lower = Eigen::Vector2d(-nlp::kUnbounded, -nlp::kUnbounded);
  dop.x_upper = Eigen::Vector2d(kBrysonDenhamBound, nlp::kUnbounded);
  dop.u_lower = Eigen::VectorXd::Constant(1, -nlp::kUnbounded);
  dop.u_upper = Eigen::VectorXd::Constant(1, nlp::kUnbounded);
  dop.x0_hint = Eigen::Vector2d(0.0, 1.0);
  dop.xf_hint = Eigen::Vector2d(0.0, -1.0);
  return dop;
}

double bryson_denham_reference_cost() {
  // The fixed-mesh problem is a convex QP the SQP solves in a couple of
  // iterations; its optimum warm-starts the flexible solve, which stalls
  // from a cold start at this resolution.
  static const double value = [] {
    transcription::DopDefinition dop = bryson_denham();
    auto mesh = transcription::FlexibleMesh::uniform(0.0, 1.0, 16, 0.5);
    auto fixed = transcription::assemble(dop, 12, mesh,
                                         transcription::ConstraintMode::BernsteinFixed);
    nlp::NlpSolution warm = nlp::solve(fixed.nlp, {1e-8, 400});
    if (warm.status != nlp::SolveStatus::Converged)
      throw std::runtime_error("reference solve did not converge");
    auto flex = transcription::assemble(
        dop, 12, mesh, transcription::ConstraintMode::BernsteinFlexible);
    flex.nlp.z0 = transcription::resample(
        flex.layout, transcription::extract_trajectory(fixed.layout, warm.z));
    nlp::NlpSolution sol = nlp::solve(flex.nlp, {1e-8, 400});
    if (sol.status != nlp::SolveStatus::Converged)
      throw std::runtime_error("reference solve did not converge");
    return sol.objective;
  }();
  return value;
}

const CartPoleConstants& cart_pole_constants() {
  static const CartPoleConstants k;
  return k;
}

transcription::DopDefinition cart_pole() {
  const CartPoleConstants& k = cart_pole_constants();
  transcription::DopDefinition dop;
  dop.n_x = 4;
  dop.n_u = 1;
  dop.t0 = 0.0;
  dop.tf = k.horizon;
  dop.l = transcription::make_running_cost(
      [](auto, auto u, const auto&) { return u[0] * u[0]; });
  dop.b = transcription::make_boundary_condition(
      8, [d = k.distance](auto x0, auto xf, auto out) {
        out[0] = x0[0];
        out[1] = x0[1];
        out[2] = x0[2];
        out[3] = x0[3];
        out[4] = xf[0] - d;
        out[5] = xf[1] - std::numbers::pi;
        out[6] = xf[2];
        out[7] = xf[3];
      });
  dop.r = transcription::make_dynamics(
      4, [](auto xd, auto x, auto u, const auto&, auto out) {
        cart_pole_residual(xd, x, u, out);
      });
  dop.x_lower = Eigen::Vector4d(k.track_min, -nlp::kUnbounded, -nlp::kUnbounded,
                                -nlp::kUnbounded);
  dop.x_upper = Eigen::Vector4d(k.track_max, nlp::kUnbounded, nlp::kUnbounded,
                                nlp::kUnbounded);
  dop.u_lower = Eigen::VectorXd::Constant(1, -k.max_force);
  dop.u_upper = Eigen::VectorXd::Constant(1, k.max_force);
  dop.x0_hint = Eigen::Vector4d::Zero();
  dop.xf_hint = Eigen::Vector4d(k.distance, std::numbers::pi, 0.0, 0.0);
  return dop;
}

Eigen::Vector4d cart_pole_rhs(const Eigen::Vector4d& x, double u) {
  std::array<double, 4> xd{};
  std::array<double, 4> xs{x[0], x[1], x[2], x[3]};
  std::array<double, 1> us{u};
  std::array<double, 4> res{};
  cart_pole_residual<double>(xd, xs, us, res);
  return -Eigen::Vector4d(res[0], res[1], res[2], res[3]);
}

double cart_pole_energy(const Eigen::Vector4d& x) {
  const CartPoleConstants& k = cart_pole_constants();
  const double c = std::cos(x[1]);
  const double kinetic =
      0.5 * (k.cart_mass + k.pole_mass) * x[2] * x[2] +
      k.pole_mass * k.pole_length * x[2] * x[3] * c +
      0.5 * k.pole_mass * k.pole_length * k.pole_length * x[3] * x[3];
  const double potential = -k.pole_mass * k.gravity * k.pole_length * c;
  return kinetic + potential;
}

SineApproximation sine_approximation(int n_p, bool flexible, bool bounded) {
  if (n_p < 1) throw std::invalid_argument("sine_approximation: n_p must be >= 1");
  SineApproximation sa;
  sa.n_p = n_p;
  sa.flexible = flexible;
  sa.bounded = bounded;
  sa.nominal = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  sa.sample_grid = quadrature::make_grid(quadrature::lgl_nodes(n_p + 1).nodes);
  const quadrature::NodeSet quad = quadrature::lgl_nodes(n_p + 2);

  const int ns = n_p + 1;
  const int nq = n_p + 2;
  const int mesh_base = 3 * ns;
  const int nz = mesh_base + (flexible ? 2 : 0);

  // interpolant values at the quadrature nodes from the samples
  Eigen::MatrixXd eval(nq, ns);
  {
    std::vector<double> unit(ns, 0.0);
    for (int j = 0; j < ns; ++j) {
      unit[j] = 1.0;
      for (int q = 0; q < nq; ++q)
        eval(q, j) = quadrature::interpolate(sa.sample_grid, unit, quad.nodes[q]);
      unit[j] = 0.0;
    }
  }

  const std::vector<double> nominal = sa.nominal;
  const std::vector<double> qnodes = quad.nodes;
  const std::vector<double> qweights = quad.weights;

  sa.nlp.n = nz;
  sa.nlp.objective = nlp::make_scalar([=](auto z) {
    using T = std::remove_cvref_t<decltype(z[0])>;
    T total{};
    for (int i = 0; i < 3; ++i) {
      T left = (flexible && i > 0) ? z[mesh_base + i - 1] : T(nominal[i]);
      T right = (flexible && i < 2) ? z[mesh_base + i] : T(nominal[i + 1]);
      T h = right - left;
      for (int q = 0; q < nq; ++q) {
        T y{};
        for (int j = 0; j < ns; ++j) y += eval(q, j) * z[i * ns + j];
        T t = left + 0.5 * (qnodes[q] + 1.0) * h;
        using std::sin;
        T d = sin(kTwoPi * t) - y;
        total += 0.5 * h * qweights[q] * d * d;
      }
    }
    return total;
  });

  const Eigen::MatrixXd transfer = transcription::bernstein_transfer_matrix(sa.sample_grid);
  const int n_bern = bounded ? 3 * ns : 0;
  const int n_mesh = flexible ? 3 : 0;
  if (n_bern + n_mesh > 0) {
    sa.nlp.inequalities = nlp::make_vector(n_bern + n_mesh, [=](auto z, auto out) {
      using T = std::remove_cvref_t<decltype(z[0])>;
      int r = 0;
      if (bounded) {
        for (int i = 0; i < 3; ++i)
          for (int c = 0; c < ns; ++c) {
            T acc{};
            for (int j = 0; j < ns; ++j) acc += transfer(c, j) * z[i * ns + j];
            out[r++] = acc;
          }
      }
      if (flexible) {
        out[r++] = z[mesh_base] - nominal[0];
        out[r++] = z[mesh_base + 1] - z[mesh_base];
        out[r++] = nominal[3] - z[mesh_base + 1];
      }
    });
    sa.nlp.il.resize(n_bern + n_mesh);
    sa.nlp.iu.resize(n_bern + n_mesh);
    sa.nlp.il.head(n_bern).setConstant(-1.0);
    sa.nlp.iu.head(n_bern).setConstant(1.0);
    if (flexible) {
      const double span = nominal[3] - nominal[0];
      const double phi = 0.5;
      for (int i = 0; i < 3; ++i) {
        const double len = nominal[i + 1] - nominal[i];
        sa.nlp.il(n_bern + i) = std::max((1.0 - phi) * len, 1e-3 * span);
        sa.nlp.iu(n_bern + i) = phi * span + (1.0 - phi) * len;
      }
    }
  }

  sa.nlp.z0.resize(nz);
  for (int i = 0; i < 3; ++i) {
    const double len = nominal[i + 1] - nominal[i];
    for (int j = 0; j < ns; ++j) {
      const double t = nominal[i] + 0.5 * (sa.sample_grid.points[j] + 1.0) * len;
      sa.nlp.z0(i * ns + j) = std::sin(kTwoPi * t);
    }
  }
  if (flexible) {
    sa.nlp.z0(mesh_base) = nominal[1];
    sa.nlp.z0(mesh_base + 1) = nominal[2];
  }
  return sa;
}

std::vector<double> SineApproximation::breakpoints(const Eigen::VectorXd& z) const {
  if (!flexible) return nominal;
  return {nominal[0], z(mesh_index(0)), z(mesh_index(1)), nominal[3]};
}

double SineApproximation::evaluate(const Eigen::VectorXd& z, double t) const {
  const std::vector<double> bp = breakpoints(z);
  int i = 0;
  while (i < 2 && t > bp[i + 1]) ++i;
  const double h = bp[i + 1] - bp[i];
  const double tau = 2.0 * (t - bp[i]) / h - 1.0;
  const int ns = n_p + 1;
  std::vector<double> samples(ns);
  for (int j = 0; j < ns; ++j) samples[j] = z(sample_index(i, j));
  return quadrature::interpolate(sample_grid, samples, tau);
}

double SineApproximation::l2_error(const Eigen::VectorXd& z) const {
  const std::vector<double> bp = breakpoints(z);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto sq = [&](double t) {
      const double d = std::sin(kTwoPi * t) - evaluate(z, t);
      return d * d;
    };
    sum += quadrature::integrate_adaptive(sq, bp[i], bp[i + 1], 1e-12, 1e-14).value;
  }
  return std::sqrt(sum);
}

std::pair<bernstein::Polynomial, bernstein::Polynomial> monotone_interpolants() {
  const std::vector<double> cubic_values = {1.0, 0.4, -0.2, -1.0};
  const std::vector<double> octic_values = {-1.0, -0.8, -0.6, -0.4, -0.2,
                                            0.0,  0.2,  0.8,  1.0};
  std::vector<double> cubic_nodes = quadrature::lgr_nodes(3).nodes;
  cubic_nodes.push_back(1.0);
  std::vector<double> octic_nodes = quadrature::lgr_nodes(8).nodes;
  octic_nodes.push_back(1.0);
  return {interpolate_monomial(cubic_nodes, cubic_values),
          interpolate_monomial(octic_nodes, octic_values)};
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"bryson-denham", "cart-pole",
                                                 "sine-approx"};
  return names;
}

transcription::DopDefinition make_dop(const std::string& name) {
  if (name == "bryson-denham") return bryson_denham();
  if (name == "cart-pole") return cart_pole();
  throw std::invalid_argument("no dynamic-optimization problem named '" + name + "'");
}

}  // namespace flexcolloc::problems
