#include "flexcolloc/problems.hpp"

#include "flexcolloc/bernstein.hpp"
#include "flexcolloc/nlp.hpp"
#include "flexcolloc/quadrature.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

using namespace flexcolloc;
using namespace flexcolloc::problems;
using Eigen::Vector4d;
using Eigen::VectorXd;

TEST_CASE("double integrator definition") {
  const transcription::DopDefinition dop = bryson_denham();
  CHECK(dop.n_x == 2);
  CHECK(dop.n_u == 1);
  CHECK(dop.t0 == 0.0);
  CHECK(dop.tf == 1.0);
  CHECK(dop.x_upper(0) == doctest::Approx(kBrysonDenhamBound));
  CHECK(std::abs(dop.x_lower(0)) >= nlp::kUnbounded);

  const double x0[] = {0.0, 1.0};
  const double xf[] = {0.0, -1.0};
  double b[4];
  dop.b.value(std::span<const double>(x0, 2), std::span<const double>(xf, 2),
              std::span<double>(b, 4));
  for (double v : b) CHECK(v == doctest::Approx(0.0).scale(1.0));

  const double xd[] = {1.0, 0.3};
  const double x[] = {0.1, 1.0};
  const double u[] = {0.3};
  double r[2];
  dop.r.value(std::span<const double>(xd, 2), std::span<const double>(x, 2),
              std::span<const double>(u, 1), 0.2, std::span<double>(r, 2));
  CHECK(r[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(r[1] == doctest::Approx(0.0).scale(1.0));

  const double l =
      dop.l.value(std::span<const double>(x, 2), std::span<const double>(u, 1), 0.2);
  CHECK(l == doctest::Approx(0.5 * 0.3 * 0.3));
}

TEST_CASE("reference cost is stable and memoized") {
  const double first = bryson_denham_reference_cost();
  CHECK(first == doctest::Approx(2.24).epsilon(0.02));
  const auto t0 = std::chrono::steady_clock::now();
  const double second = bryson_denham_reference_cost();
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(second == first);
  CHECK(elapsed < 0.5);
}

TEST_CASE("cart pole definition and helpers") {
  const CartPoleConstants& k = cart_pole_constants();
  const transcription::DopDefinition dop = cart_pole();
  CHECK(dop.n_x == 4);
  CHECK(dop.tf == doctest::Approx(k.horizon));
  CHECK(dop.x_lower(0) == doctest::Approx(k.track_min));
  CHECK(dop.x_upper(0) == doctest::Approx(k.track_max));
  CHECK(dop.u_upper(0) == doctest::Approx(k.max_force));
  CHECK(dop.b.dim == 8);

  SUBCASE("boundary hints satisfy the boundary conditions") {
    double b[8];
    dop.b.value(std::span<const double>(dop.x0_hint.data(), 4),
                std::span<const double>(dop.xf_hint.data(), 4),
                std::span<double>(b, 8));
    for (double v : b) CHECK(v == doctest::Approx(0.0).scale(1.0));
  }

  SUBCASE("rest is an equilibrium and rates pass through") {
    CHECK(cart_pole_rhs(Vector4d::Zero(), 0.0).norm() == doctest::Approx(0.0).scale(1.0));
    const Vector4d x(0.3, 1.1, -0.4, 0.9);
    const Vector4d xd = cart_pole_rhs(x, 2.5);
    CHECK(xd(0) == doctest::Approx(x(2)));
    CHECK(xd(1) == doctest::Approx(x(3)));
  }

  SUBCASE("dynamics residual vanishes on the rhs") {
    const Vector4d x(0.2, 0.8, 0.5, -1.2);
    const double u = 3.0;
    const Vector4d xd = cart_pole_rhs(x, u);
    double out[4];
    const double us[] = {u};
    dop.r.value(std::span<const double>(xd.data(), 4),
                std::span<const double>(x.data(), 4),
                std::span<const double>(us, 1), 0.7, std::span<double>(out, 4));
    for (double v : out) CHECK(v == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("unforced cart pole conserves energy") {
  const auto f = [](double, const VectorXd& x) -> VectorXd {
    return cart_pole_rhs(Vector4d(x(0), x(1), x(2), x(3)), 0.0);
  };
  for (const Vector4d x0 : {Vector4d(0.0, 0.4, 0.0, 0.0),
                            Vector4d(0.2, 2.0, 0.3, -0.5)}) {
    const double e0 = cart_pole_energy(x0);
    const VectorXd xT = testutil::rk4(f, x0, 0.0, 1.0, 4000);
    const double eT = cart_pole_energy(Vector4d(xT(0), xT(1), xT(2), xT(3)));
    CHECK(eT == doctest::Approx(e0).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("forced cart pole balances energy against input work") {
  const double u = 4.0;
  const auto f = [u](double, const VectorXd& x) -> VectorXd {
    // Augmented last component integrates the input power u * q1dot.
    VectorXd out(5);
    out.head(4) = cart_pole_rhs(Vector4d(x(0), x(1), x(2), x(3)), u);
    out(4) = u * x(2);
    return out;
  };
  VectorXd x0 = VectorXd::Zero(5);
  x0(1) = 0.3;
  const double e0 = cart_pole_energy(Vector4d(x0(0), x0(1), x0(2), x0(3)));
  const VectorXd xT = testutil::rk4(f, x0, 0.0, 1.0, 4000);
  const double eT = cart_pole_energy(Vector4d(xT(0), xT(1), xT(2), xT(3)));
  CHECK(eT - e0 == doctest::Approx(xT(4)).epsilon(1e-6).scale(1.0));
}

TEST_CASE("monotone interpolation fixtures") {
  const auto [cubic, octic] = monotone_interpolants();
  CHECK(cubic.degree() == 3);
  CHECK(octic.degree() == 8);

  SUBCASE("values at their defining points") {
    const std::vector<double> cubic_vals = {1.0, 0.4, -0.2, -1.0};
    const quadrature::InterpolationGrid g3 = quadrature::state_grid(3);
    for (int j = 0; j < 4; ++j)
      CHECK(cubic(g3.points[j]) == doctest::Approx(cubic_vals[j]).epsilon(1e-10));
    const std::vector<double> octic_vals = {-1.0, -0.8, -0.6, -0.4, -0.2,
                                            0.0,  0.2,  0.8,  1.0};
    const quadrature::InterpolationGrid g8 = quadrature::state_grid(8);
    for (int j = 0; j < 9; ++j)
      CHECK(octic(g8.points[j]) == doctest::Approx(octic_vals[j]).epsilon(1e-9));
  }

  SUBCASE("monotonic but not hull-tight over the full interval") {
    CHECK(bernstein::monotonicity(cubic, -1.0, 1.0) ==
          bernstein::Monotonicity::NonIncreasing);
    CHECK(bernstein::monotonicity(octic, -1.0, 1.0) ==
          bernstein::Monotonicity::NonDecreasing);
    for (const bernstein::Polynomial* p : {&cubic, &octic}) {
      const bernstein::HullBounds hb =
          bernstein::hull_bounds(bernstein::to_bernstein(
              bernstein::rescale_to_unit(*p, -1.0, 2.0)));
      CHECK((!hb.tight_lower || !hb.tight_upper));
    }
  }

  SUBCASE("tight partitions exist with few pieces") {
    for (const bernstein::Polynomial* p : {&cubic, &octic}) {
      const bernstein::Partition part = bernstein::tight_partition(*p, -1.0, 1.0);
      CHECK(part.pieces() >= 1);
      CHECK(part.pieces() <= 64);
      CHECK(part.breakpoints.front() == doctest::Approx(-1.0));
      CHECK(part.breakpoints.back() == doctest::Approx(1.0));
      for (int i = 0; i < part.pieces(); ++i) {
        const double a = part.breakpoints[i];
        const double h = part.breakpoints[i + 1] - a;
        const bernstein::HullBounds hb = bernstein::hull_bounds(
            bernstein::to_bernstein(bernstein::rescale_to_unit(*p, a, h)));
        CHECK(hb.tight_lower);
        CHECK(hb.tight_upper);
        for (int q = 0; q <= 500; ++q) {
          const double v = (*p)(a + h * q / 500.0);
          CHECK(v >= hb.lower - 1e-9);
          CHECK(v <= hb.upper + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("piecewise sine fit") {
  SUBCASE("layout and initial guess") {
    const SineApproximation fixed = sine_approximation(3, false, true);
    CHECK(fixed.nlp.n == 3 * 4);
    CHECK(fixed.nlp.inequalities.dim == 3 * 4);
    CHECK(fixed.nominal == std::vector<double>{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
    CHECK(fixed.breakpoints(fixed.nlp.z0) == fixed.nominal);

    const SineApproximation free_fit = sine_approximation(3, false, false);
    CHECK(free_fit.nlp.inequalities.dim == 0);

    const SineApproximation flex = sine_approximation(3, true, true);
    CHECK(flex.nlp.n == 3 * 4 + 2);
    CHECK(flex.nlp.inequalities.dim == 3 * 4 + 3);
    CHECK(flex.nlp.z0(flex.mesh_index(0)) == doctest::Approx(1.0 / 3.0));
    CHECK(flex.nlp.z0(flex.mesh_index(1)) == doctest::Approx(2.0 / 3.0));
    VectorXd z = flex.nlp.z0;
    z(flex.mesh_index(0)) = 0.25;
    z(flex.mesh_index(1)) = 0.75;
    const std::vector<double> bp = flex.breakpoints(z);
    CHECK(bp[1] == doctest::Approx(0.25));
    CHECK(bp[2] == doctest::Approx(0.75));

    CHECK_THROWS_AS(sine_approximation(0, false), std::invalid_argument);
  }

  SUBCASE("evaluation interpolates the samples") {
    const SineApproximation sa = sine_approximation(4, false, true);
    const VectorXd& z = sa.nlp.z0;
    for (int i = 0; i < 3; ++i) {
      const double a = sa.nominal[i];
      const double h = sa.nominal[i + 1] - a;
      for (int j = 1; j < sa.sample_grid.size() - 1; ++j) {
        const double t = a + 0.5 * (sa.sample_grid.points[j] + 1.0) * h;
        CHECK(sa.evaluate(z, t) ==
              doctest::Approx(z(sa.sample_index(i, j))).epsilon(1e-12));
      }
    }
  }

  SUBCASE("zero coefficients give the norm of the sine") {
    const SineApproximation sa = sine_approximation(3, false, false);
    const VectorXd zero = VectorXd::Zero(sa.nlp.n);
    CHECK(sa.evaluate(zero, 0.37) == doctest::Approx(0.0).scale(1.0));
    CHECK(sa.l2_error(zero) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  }

  SUBCASE("coefficient bounds cost fit accuracy but stay feasible") {
    const SineApproximation bounded = sine_approximation(3, false, true);
    const SineApproximation free_fit = sine_approximation(3, false, false);
    const nlp::NlpSolution sb = nlp::solve(bounded.nlp, {1e-8, 500});
    const nlp::NlpSolution sf = nlp::solve(free_fit.nlp, {1e-8, 500});
    REQUIRE(sb.status == nlp::SolveStatus::Converged);
    REQUIRE(sf.status == nlp::SolveStatus::Converged);
    CHECK(free_fit.l2_error(sf.z) <= bounded.l2_error(sb.z) + 1e-12);
    CHECK(bounded.l2_error(sb.z) <= 0.05);
    // Every piece keeps its Bernstein coefficients inside [-1, 1].
    VectorXd rows(bounded.nlp.inequalities.dim);
    bounded.nlp.inequalities.value(
        std::span<const double>(sb.z.data(), sb.z.size()),
        std::span<double>(rows.data(), rows.size()));
    CHECK(rows.maxCoeff() <= 1.0 + 1e-7);
    CHECK(rows.minCoeff() >= -1.0 - 1e-7);
  }
}

TEST_CASE("problem registry") {
  const std::vector<std::string>& names = problem_names();
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "bryson-denham");
  CHECK(names[1] == "cart-pole");
  CHECK(names[2] == "sine-approx");
  CHECK(make_dop("bryson-denham").n_x == 2);
  CHECK(make_dop("cart-pole").n_x == 4);
  CHECK_THROWS_AS(make_dop("sine-approx"), std::invalid_argument);
  CHECK_THROWS_AS(make_dop("unknown"), std::invalid_argument);
}
