#include "flexcolloc/transcription.hpp"

#include "flexcolloc/bernstein.hpp"
#include "flexcolloc/nlp.hpp"
#include "flexcolloc/problems.hpp"
#include "flexcolloc/quadrature.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace flexcolloc;
using namespace flexcolloc::transcription;
using Eigen::VectorXd;

namespace {

bool finite_bound(double b) { return std::abs(b) < nlp::kUnbounded; }

int boxed_components(const VectorXd& lo, const VectorXd& hi, int dim) {
  int count = 0;
  for (int k = 0; k < dim; ++k) {
    const double l = lo.size() ? lo(k) : -nlp::kUnbounded;
    const double u = hi.size() ? hi(k) : nlp::kUnbounded;
    if (finite_bound(l) || finite_bound(u)) ++count;
  }
  return count;
}

/// Scalar integrator problem xdot = u with x(0) = 0, running cost u^2 and
/// boundary cost 2 x(tf); the optimum is irrelevant, only the transcription
/// algebra is probed.
DopDefinition integrator_dop() {
  DopDefinition dop;
  dop.n_x = 1;
  dop.n_u = 1;
  dop.t0 = 0.0;
  dop.tf = 1.0;
  dop.m = make_boundary_cost(
      [](auto, auto xf) { return 2.0 * xf[0]; });
  dop.l = make_running_cost(
      [](auto, auto u, auto) { return u[0] * u[0]; });
  dop.b = make_boundary_condition(1, [](auto x0, auto, auto out) { out[0] = x0[0]; });
  dop.r = make_dynamics(1, [](auto xd, auto, auto u, auto, auto out) {
    out[0] = xd[0] - u[0];
  });
  return dop;
}

/// Fills z with samples of x(t), u(t) on the layout's grids.
template <class Fx, class Fu>
VectorXd sample_exact(const DecisionLayout& lay, Fx x, Fu u) {
  const quadrature::InterpolationGrid sg = quadrature::state_grid(lay.n);
  const quadrature::InterpolationGrid ug = quadrature::input_grid(lay.n);
  VectorXd z = VectorXd::Zero(lay.total());
  for (int i = 0; i < lay.n_h; ++i) {
    const double a = lay.mesh.nominal[i];
    const double h = lay.mesh.nominal[i + 1] - a;
    for (int j = 0; j <= lay.n; ++j)
      for (int k = 0; k < lay.n_x; ++k)
        z(lay.state_index(i, j, k)) = x(a + 0.5 * (sg.points[j] + 1.0) * h, k);
    for (int j = 0; j < lay.n; ++j)
      for (int k = 0; k < lay.n_u; ++k)
        z(lay.input_index(i, j, k)) = u(a + 0.5 * (ug.points[j] + 1.0) * h, k);
  }
  return z;
}

}  // namespace

TEST_CASE("decision layout sizes and state aliasing") {
  const DopDefinition dop = problems::make_dop("bryson-denham");
  const int n_sb = boxed_components(dop.x_lower, dop.x_upper, dop.n_x);
  const int n_ib = boxed_components(dop.u_lower, dop.u_upper, dop.n_u);
  for (const ConstraintMode mode :
       {ConstraintMode::SamplePoints, ConstraintMode::BernsteinFixed,
        ConstraintMode::BernsteinFlexible}) {
    const std::pair<int, int> cases[] = {{2, 1}, {3, 3}, {5, 4}};
    for (const auto& [n, n_h] : cases) {
      const FlexibleMesh mesh = FlexibleMesh::uniform(dop.t0, dop.tf, n_h, 0.4);
      const TranscribedProblem tp = assemble(dop, n, mesh, mode);
      const DecisionLayout& lay = tp.layout;
      CHECK(lay.num_states == (n_h * n + 1) * dop.n_x);
      CHECK(lay.num_inputs == n_h * n * dop.n_u);
      const bool flex = mode == ConstraintMode::BernsteinFlexible;
      CHECK(lay.num_mesh == (flex ? n_h - 1 : 0));
      CHECK(lay.total() == lay.num_states + lay.num_inputs + lay.num_mesh);
      CHECK(tp.nlp.n == lay.total());
      CHECK(tp.nlp.z0.size() == lay.total());
      for (int i = 0; i + 1 < n_h; ++i)
        for (int k = 0; k < dop.n_x; ++k)
          CHECK(lay.state_index(i, n, k) == lay.state_index(i + 1, 0, k));
      CHECK(tp.nlp.equalities.dim == dop.b.dim + n_h * n * dop.r.dim);
      if (mode == ConstraintMode::SamplePoints) {
        CHECK(tp.nlp.inequalities.dim == 0);
        REQUIRE(tp.nlp.zl.size() == lay.total());
        bool any_finite = false;
        for (int idx = 0; idx < lay.total(); ++idx)
          any_finite = any_finite || finite_bound(tp.nlp.zl(idx)) ||
                       finite_bound(tp.nlp.zu(idx));
        CHECK(any_finite == (n_sb + n_ib > 0));
      } else {
        // Interval-length rows appear only when a breakpoint can move.
        const int per_interval = n_sb * (n + 1) + n_ib * n;
        CHECK(tp.nlp.inequalities.dim ==
              n_h * per_interval + (flex && n_h > 1 ? n_h : 0));
      }
      if (flex) {
        CHECK(lay.mesh_index(1) == lay.num_states + lay.num_inputs);
        for (int i = 1; i < n_h; ++i)
          CHECK(tp.nlp.z0(lay.mesh_index(i)) ==
                doctest::Approx(lay.mesh.nominal[i]));
      }
    }
  }
}

TEST_CASE("gamma maps tau onto the interval") {
  CHECK(gamma(-1.0, 2.0, 5.0) == doctest::Approx(2.0));
  CHECK(gamma(1.0, 2.0, 5.0) == doctest::Approx(5.0));
  CHECK(gamma(0.0, 2.0, 5.0) == doctest::Approx(3.5));
  CHECK(gamma(0.4, -1.0, 1.0) == doctest::Approx(0.4));
  CHECK_THROWS_AS(gamma(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma(0.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("bernstein transfer matrix reproduces interpolants") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 1; n <= 8; ++n) {
    for (const bool use_state : {true, false}) {
      const quadrature::InterpolationGrid grid =
          use_state ? quadrature::state_grid(n) : quadrature::input_grid(n);
      const Eigen::MatrixXd M = bernstein_transfer_matrix(grid);
      REQUIRE(M.rows() == grid.size());
      REQUIRE(M.cols() == grid.size());
      CHECK((M * VectorXd::Ones(grid.size()) - VectorXd::Ones(grid.size()))
                .lpNorm<Eigen::Infinity>() <= 1e-12);
      for (int trial = 0; trial < 20; ++trial) {
        const bernstein::Polynomial p =
            testutil::random_polynomial(rng, grid.size() - 1);
        VectorXd v(grid.size());
        for (int j = 0; j < grid.size(); ++j) v(j) = p(grid.points[j]);
        const VectorXd c = M * v;
        const bernstein::BernsteinForm bf{
            std::vector<double>(c.data(), c.data() + c.size())};
        for (int q = 0; q < 10; ++q) {
          const double s = unit(rng);
          CHECK(bf(s) == doctest::Approx(p(2.0 * s - 1.0))
                             .epsilon(1e-9)
                             .scale(1.0));
        }
        const bernstein::BernsteinForm oracle = bernstein::degree_elevate(
            bernstein::to_bernstein(bernstein::rescale_to_unit(p, -1.0, 2.0)),
            grid.size() - 1);
        for (int j = 0; j < grid.size(); ++j)
          CHECK(c(j) == doctest::Approx(oracle.coeffs[j])
                            .epsilon(1e-8)
                            .scale(1.0));
      }
    }
  }
}

TEST_CASE("polynomial solutions satisfy the transcription exactly") {
  const DopDefinition dop = integrator_dop();
  const FlexibleMesh mesh = FlexibleMesh::uniform(0.0, 1.0, 2, 0.0);
  const TranscribedProblem tp =
      assemble(dop, 5, mesh, ConstraintMode::SamplePoints);
  const VectorXd z = sample_exact(
      tp.layout, [](double t, int) { return t * t * t; },
      [](double t, int) { return 3.0 * t * t; });

  VectorXd ce(tp.nlp.equalities.dim);
  tp.nlp.equalities.value(std::span<const double>(z.data(), z.size()),
                          std::span<double>(ce.data(), ce.size()));
  CHECK(ce.lpNorm<Eigen::Infinity>() <= 1e-10);

  // 2 x(1) + integral of (3 t^2)^2 = 2 + 9/5.
  const double f =
      tp.nlp.objective.value(std::span<const double>(z.data(), z.size()));
  CHECK(f == doctest::Approx(3.8).epsilon(1e-12));
}

TEST_CASE("trajectory evaluation on manufactured data") {
  const DopDefinition dop = integrator_dop();
  const FlexibleMesh mesh = FlexibleMesh::uniform(0.0, 1.0, 2, 0.0);
  const TranscribedProblem tp =
      assemble(dop, 5, mesh, ConstraintMode::SamplePoints);
  const VectorXd z = sample_exact(
      tp.layout, [](double t, int) { return t * t * t; },
      [](double t, int) { return 3.0 * t * t; });
  const Trajectory traj = extract_trajectory(tp.layout, z);
  REQUIRE(traj.intervals() == 2);
  CHECK(traj.breakpoints[1] == doctest::Approx(0.5));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ts(0.0, 1.0);
  for (int q = 0; q < 50; ++q) {
    const double t = ts(rng);
    CHECK(traj.state(t)(0) == doctest::Approx(t * t * t).epsilon(1e-10).scale(1.0));
    CHECK(traj.input(t)(0) ==
          doctest::Approx(3.0 * t * t).epsilon(1e-9).scale(1.0));
    CHECK(traj.state_derivative(t)(0) ==
          doctest::Approx(3.0 * t * t).epsilon(1e-8).scale(1.0));
  }

  SUBCASE("breakpoint queries resolve to the left interval") {
    VectorXd zstep = VectorXd::Zero(tp.layout.total());
    for (int j = 0; j < 5; ++j) {
      zstep(tp.layout.input_index(0, j, 0)) = 1.0;
      zstep(tp.layout.input_index(1, j, 0)) = 2.0;
    }
    const Trajectory step = extract_trajectory(tp.layout, zstep);
    CHECK(step.interval_of(0.5) == 0);
    CHECK(step.input(0.5)(0) == doctest::Approx(1.0));
    CHECK(step.input(0.5 + 1e-9)(0) == doctest::Approx(2.0));
  }
}

TEST_CASE("extract and resample invert each other") {
  const DopDefinition dop = problems::make_dop("bryson-denham");
  const FlexibleMesh mesh = FlexibleMesh::uniform(dop.t0, dop.tf, 3, 0.4);
  const TranscribedProblem tp =
      assemble(dop, 4, mesh, ConstraintMode::BernsteinFlexible);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VectorXd z = tp.nlp.z0;
  for (int idx = 0; idx < tp.layout.num_states + tp.layout.num_inputs; ++idx)
    z(idx) += unit(rng);
  for (int i = 1; i < tp.layout.n_h; ++i)
    z(tp.layout.mesh_index(i)) += 0.03 * unit(rng);

  const Trajectory traj = extract_trajectory(tp.layout, z);
  const VectorXd back = resample(tp.layout, traj);
  CHECK((back - z).lpNorm<Eigen::Infinity>() <= 1e-10);

  SUBCASE("resampling to a higher degree preserves the polynomial") {
    const TranscribedProblem fine =
        assemble(dop, 7, mesh, ConstraintMode::BernsteinFlexible);
    const VectorXd z2 = resample(fine.layout, traj);
    const Trajectory t2 = extract_trajectory(fine.layout, z2);
    for (int i = 1; i < 3; ++i)
      CHECK(t2.breakpoints[i] == doctest::Approx(traj.breakpoints[i]));
    for (int q = 0; q < 40; ++q) {
      const double t = dop.t0 + (dop.tf - dop.t0) * 0.025 * q;
      CHECK((t2.state(t) - traj.state(t)).lpNorm<Eigen::Infinity>() <= 1e-8);
      CHECK((t2.input(t) - traj.input(t)).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }
}

TEST_CASE("path constraints reduce to slack inputs and algebraic rows") {
  const DopDefinition dop = integrator_dop();
  const PathOutput g = make_path_output(1, [](auto x, auto u, auto, auto out) {
    out[0] = x[0] + 2.0 * u[0];
  });
  const DopDefinition red = reduce_path_constraint(
      dop, g, VectorXd::Constant(1, -3.0), VectorXd::Constant(1, 3.0));
  CHECK(red.n_x == dop.n_x);
  CHECK(red.n_u == dop.n_u + 1);
  CHECK(red.r.dim == dop.r.dim + 1);
  REQUIRE(red.u_lower.size() == 2);
  CHECK(red.u_lower(1) == doctest::Approx(-3.0));
  CHECK(red.u_upper(1) == doctest::Approx(3.0));

  const double xd[] = {1.0};
  const double x[] = {0.5};
  const double u[] = {0.25, 0.7};
  double out[2];
  red.r.value(std::span<const double>(xd, 1), std::span<const double>(x, 1),
              std::span<const double>(u, 2), 0.3, std::span<double>(out, 2));
  CHECK(out[0] == doctest::Approx(1.0 - 0.25));
  CHECK(out[1] == doctest::Approx(0.5 + 0.5 - 0.7));

  SUBCASE("inconsistent bounds are rejected") {
    CHECK_THROWS_AS(reduce_path_constraint(dop, g, VectorXd::Constant(1, 1.0),
                                           VectorXd::Constant(1, -1.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("pinned flexible mesh reproduces the fixed-mesh optimum") {
  const DopDefinition dop = problems::make_dop("bryson-denham");
  const FlexibleMesh mesh = FlexibleMesh::uniform(dop.t0, dop.tf, 3, 0.0);
  const TranscribedProblem fixed =
      assemble(dop, 3, mesh, ConstraintMode::BernsteinFixed);
  const TranscribedProblem flex =
      assemble(dop, 3, mesh, ConstraintMode::BernsteinFlexible);
  const nlp::NlpSolution sb = nlp::solve(fixed.nlp, {1e-8, 2000});
  const nlp::NlpSolution sc = nlp::solve(flex.nlp, {1e-8, 2000});
  REQUIRE(sb.status == nlp::SolveStatus::Converged);
  REQUIRE(sc.status == nlp::SolveStatus::Converged);
  CHECK(std::abs(sb.objective - sc.objective) <=
        1e-6 * (1.0 + std::abs(sb.objective)));
  const Trajectory tc = extract_trajectory(flex.layout, sc.z);
  for (int i = 1; i < 3; ++i)
    CHECK(tc.breakpoints[i] == doctest::Approx(mesh.nominal[i]).epsilon(1e-9));
}

TEST_CASE("assemble validates its inputs") {
  const DopDefinition dop = integrator_dop();
  const FlexibleMesh mesh = FlexibleMesh::uniform(0.0, 1.0, 2, 0.0);
  CHECK_THROWS_AS(assemble(dop, 0, mesh, ConstraintMode::SamplePoints),
                  std::invalid_argument);
  FlexibleMesh wrong = mesh;
  wrong.nominal.back() = 2.0;
  CHECK_THROWS_AS(assemble(dop, 3, wrong, ConstraintMode::SamplePoints),
                  std::invalid_argument);
  CHECK_THROWS_AS(FlexibleMesh::uniform(0.0, 1.0, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FlexibleMesh::uniform(0.0, 1.0, 0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(FlexibleMesh::uniform(1.0, 0.0, 2, 0.3), std::invalid_argument);
  DopDefinition no_dyn = dop;
  no_dyn.r = {};
  CHECK_THROWS_AS(assemble(no_dyn, 3, mesh, ConstraintMode::SamplePoints),
                  std::invalid_argument);
}
