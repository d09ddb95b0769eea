#include "flexcolloc/nlp.hpp"

#include "flexcolloc/problems.hpp"
#include "flexcolloc/transcription.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace flexcolloc;
using namespace flexcolloc::nlp;
using Eigen::VectorXd;

namespace {

constexpr double kInf = kUnbounded;

/// Converged solution with objective at the known optimum and, optionally,
/// the known minimizer; also checks the solution invariants and that the
/// merit only increases by terminal-phase slack.
void check_solution(const NlpSolution& s, double f_star, const VectorXd* z_star,
                    double f_tol) {
  REQUIRE(s.status == SolveStatus::Converged);
  CHECK(s.kkt_residual <= 1e-8);
  CHECK(s.constraint_violation <= 1e-8);
  CHECK(std::abs(s.objective - f_star) <= f_tol);
  if (z_star != nullptr)
    CHECK((s.z - *z_star).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(!s.merit_history.empty());
  for (const auto& e : s.merit_history)
    CHECK(e[1] <= e[0] + 1e-8 * (1.0 + std::abs(e[0])));
}

}  // namespace

TEST_CASE("unconstrained quadratic") {
  NlpProblem p;
  p.n = 1;
  p.objective = make_scalar([](auto z) { return (z[0] - 3.0) * (z[0] - 3.0); });
  p.z0 = VectorXd::Zero(1);
  VectorXd zs(1);
  zs << 3.0;
  check_solution(solve(p), 0.0, &zs, 1e-8);
}

TEST_CASE("symmetric equality projection") {
  NlpProblem p;
  p.n = 2;
  p.objective = make_scalar([](auto z) { return z[0] * z[0] + z[1] * z[1]; });
  p.equalities = make_vector(1, [](auto z, auto out) { out[0] = z[0] + z[1] - 1.0; });
  p.z0 = VectorXd::Zero(2);
  VectorXd zs(2);
  zs << 0.5, 0.5;
  check_solution(solve(p), 0.5, &zs, 1e-8);
}

TEST_CASE("active inequality with known multiplier") {
  NlpProblem p;
  p.n = 1;
  p.objective = make_scalar([](auto z) { return z[0] * z[0]; });
  p.inequalities = make_vector(1, [](auto z, auto out) { out[0] = z[0]; });
  p.il = VectorXd::Constant(1, 1.0);
  p.iu = VectorXd::Constant(1, kInf);
  p.z0 = VectorXd::Constant(1, 5.0);
  const NlpSolution s = solve(p);
  VectorXd zs(1);
  zs << 1.0;
  check_solution(s, 1.0, &zs, 1e-8);
  CHECK(s.lambda_ineq(0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("smoke set of benchmark programs with known optima") {
  SUBCASE("rosenbrock") {
    NlpProblem p;
    p.n = 2;
    p.objective = make_scalar([](auto z) {
      auto a = z[1] - z[0] * z[0];
      auto b = 1.0 - z[0];
      return 100.0 * a * a + b * b;
    });
    p.z0 = VectorXd(2);
    p.z0 << -1.2, 1.0;
    VectorXd zs(2);
    zs << 1.0, 1.0;
    check_solution(solve(p, {1e-8, 500}), 0.0, &zs, 1e-7);
  }
  SUBCASE("quartic valley with quadratic equality") {
    NlpProblem p;
    p.n = 2;
    p.objective = make_scalar([](auto z) {
      auto b = 1.0 - z[0];
      return b * b;
    });
    p.equalities =
        make_vector(1, [](auto z, auto out) { out[0] = 10.0 * (z[1] - z[0] * z[0]); });
    p.z0 = VectorXd(2);
    p.z0 << -1.2, 1.0;
    VectorXd zs(2);
    zs << 1.0, 1.0;
    check_solution(solve(p, {1e-8, 500}), 0.0, &zs, 1e-7);
  }
  SUBCASE("log objective on a quartic circle") {
    NlpProblem p;
    p.n = 2;
    p.objective = make_scalar([](auto z) { return log(1.0 + z[0] * z[0]) - z[1]; });
    p.equalities = make_vector(1, [](auto z, auto out) {
      auto t = 1.0 + z[0] * z[0];
      out[0] = t * t + z[1] * z[1] - 4.0;
    });
    p.z0 = VectorXd(2);
    p.z0 << 2.0, 2.0;
    check_solution(solve(p, {1e-8, 500}), -std::sqrt(3.0), nullptr, 1e-7);
  }
  SUBCASE("linear-equality least squares") {
    NlpProblem p;
    p.n = 5;
    p.objective = make_scalar([](auto z) {
      auto a = z[0] - z[1];
      auto b = z[1] + z[2] - 2.0;
      auto c = z[3] - 1.0;
      auto d = z[4] - 1.0;
      return a * a + b * b + c * c + d * d;
    });
    p.equalities = make_vector(3, [](auto z, auto out) {
      out[0] = z[0] + 3.0 * z[1] - 4.0;
      out[1] = z[2] + z[3] - 2.0 * z[4];
      out[2] = z[1] - z[4];
    });
    p.z0 = VectorXd(5);
    p.z0 << 2.5, 0.5, 2.0, -1.0, 0.5;
    VectorXd zs = VectorXd::Ones(5);
    check_solution(solve(p), 0.0, &zs, 1e-8);
  }
  SUBCASE("convex QP with box and linear inequality") {
    NlpProblem p;
    p.n = 3;
    p.objective = make_scalar([](auto z) {
      return 9.0 - 8.0 * z[0] - 6.0 * z[1] - 4.0 * z[2] + 2.0 * z[0] * z[0] +
             2.0 * z[1] * z[1] + z[2] * z[2] + 2.0 * z[0] * z[1] +
             2.0 * z[0] * z[2];
    });
    p.inequalities =
        make_vector(1, [](auto z, auto out) { out[0] = z[0] + z[1] + 2.0 * z[2]; });
    p.il = VectorXd::Constant(1, -kInf);
    p.iu = VectorXd::Constant(1, 3.0);
    p.zl = VectorXd::Zero(3);
    p.zu = VectorXd::Constant(3, kInf);
    p.z0 = VectorXd::Constant(3, 0.5);
    VectorXd zs(3);
    zs << 4.0 / 3.0, 7.0 / 9.0, 4.0 / 9.0;
    check_solution(solve(p), 1.0 / 9.0, &zs, 1e-7);
  }
  SUBCASE("three quadratic inequalities") {
    NlpProblem p;
    p.n = 4;
    p.objective = make_scalar([](auto z) {
      return z[0] * z[0] + z[1] * z[1] + 2.0 * z[2] * z[2] + z[3] * z[3] -
             5.0 * z[0] - 5.0 * z[1] - 21.0 * z[2] + 7.0 * z[3];
    });
    p.inequalities = make_vector(3, [](auto z, auto out) {
      out[0] = 8.0 - z[0] * z[0] - z[1] * z[1] - z[2] * z[2] - z[3] * z[3] -
               z[0] + z[1] - z[2] + z[3];
      out[1] = 10.0 - z[0] * z[0] - 2.0 * z[1] * z[1] - z[2] * z[2] -
               2.0 * z[3] * z[3] + z[0] + z[3];
      out[2] = 5.0 - 2.0 * z[0] * z[0] - z[1] * z[1] - z[2] * z[2] -
               2.0 * z[0] + z[1] + z[3];
    });
    p.il = VectorXd::Zero(3);
    p.iu = VectorXd::Constant(3, kInf);
    p.z0 = VectorXd::Zero(4);
    VectorXd zs(4);
    zs << 0.0, 1.0, 2.0, -1.0;
    check_solution(solve(p, {1e-8, 500}), -44.0, &zs, 1e-6);
  }
  SUBCASE("mixed equality and circle inequality") {
    NlpProblem p;
    p.n = 2;
    p.objective = make_scalar([](auto z) {
      auto a = z[0] - 2.0;
      auto b = z[1] - 1.0;
      return a * a + b * b;
    });
    p.equalities =
        make_vector(1, [](auto z, auto out) { out[0] = z[0] - 2.0 * z[1] + 1.0; });
    p.inequalities = make_vector(1, [](auto z, auto out) {
      out[0] = -0.25 * z[0] * z[0] - z[1] * z[1] + 1.0;
    });
    p.il = VectorXd::Zero(1);
    p.iu = VectorXd::Constant(1, kInf);
    p.z0 = VectorXd(2);
    p.z0 << 2.0, 2.0;
    check_solution(solve(p, {1e-8, 500}), 9.0 - 2.875 * std::sqrt(7.0), nullptr,
                   1e-7);
  }
}

TEST_CASE("contradictory constraints do not converge") {
  NlpProblem p;
  p.n = 1;
  p.objective = make_scalar([](auto z) { return z[0] * z[0]; });
  p.equalities = make_vector(2, [](auto z, auto out) {
    out[0] = z[0] - 1.0;
    out[1] = z[0] + 1.0;
  });
  p.z0 = VectorXd::Zero(1);
  const NlpSolution s = solve(p, {1e-8, 100});
  CHECK(s.status != SolveStatus::Converged);
  CHECK(s.constraint_violation >= 0.9);
}

TEST_CASE("badly scaled objective converges after internal scaling") {
  NlpProblem p;
  p.n = 2;
  p.objective = make_scalar([](auto z) {
    auto a = z[0] - 1.0;
    auto b = z[1] + 2.0;
    return 3.0e7 * (a * a + b * b) + 1.0e7;
  });
  p.z0 = VectorXd::Constant(2, 10.0);
  const NlpSolution s = solve(p, {1e-8, 200});
  REQUIRE(s.status == SolveStatus::Converged);
  CHECK(s.z(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.z(1) == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("gradient and jacobian helpers") {
  SUBCASE("product rule") {
    const ScalarCallback f =
        make_scalar([](auto z) { return z[0] * z[1]; });
    VectorXd z(2);
    z << 2.0, 3.0;
    const VectorXd g = gradient(f, z);
    CHECK(g(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g(1) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("constants have zero gradient") {
    const ScalarCallback f = make_scalar([](auto) { return 4.2; });
    const VectorXd g = gradient(f, VectorXd::Ones(3));
    CHECK(g.lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("transcendental matches finite differences") {
    const ScalarCallback f = make_scalar([](auto z) { return sin(z[0]); });
    VectorXd z(1);
    z << 0.7;
    const VectorXd g = gradient(f, z);
    CHECK(g(0) == doctest::Approx(std::cos(0.7)).epsilon(1e-12));
    const VectorXd fd = testutil::central_gradient(
        [&](const VectorXd& y) { return std::sin(y(0)); }, z);
    CHECK(g(0) == doctest::Approx(fd(0)).epsilon(1e-6));
  }
  SUBCASE("finite-difference fallback without a dual callback") {
    ScalarCallback f;
    f.value = [](std::span<const double> z) { return z[0] * z[0] * z[0]; };
    VectorXd z(1);
    z << 2.0;
    const VectorXd g = gradient(f, z);
    CHECK(g(0) == doctest::Approx(12.0).epsilon(1e-7));
  }
  SUBCASE("jacobian of a vector map") {
    const VectorCallback c = make_vector(2, [](auto z, auto out) {
      out[0] = z[0] * z[0] + z[1];
      out[1] = exp(z[1]);
    });
    VectorXd z(2);
    z << 1.5, 0.25;
    const Eigen::MatrixXd J = jacobian(c, z);
    CHECK(J(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(J(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(J(1, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(J(1, 1) == doctest::Approx(std::exp(0.25)).epsilon(1e-12));
  }
}

TEST_CASE("forward-mode derivatives of assembled problems match central "
          "differences") {
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const char* name : {"bryson-denham", "cart-pole"}) {
    const transcription::DopDefinition dop = problems::make_dop(name);
    const transcription::FlexibleMesh mesh =
        transcription::FlexibleMesh::uniform(dop.t0, dop.tf, 3, 0.4);
    const transcription::TranscribedProblem tp = transcription::assemble(
        dop, 5, mesh, transcription::ConstraintMode::BernsteinFlexible);
    for (int trial = 0; trial < 3; ++trial) {
      VectorXd z = tp.nlp.z0;
      for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) += 0.1 * (1.0 + std::abs(z(i))) * unit(rng);
      const VectorXd g = gradient(tp.nlp.objective, z);
      const VectorXd g_fd = testutil::central_gradient(
          [&](const VectorXd& y) {
            return tp.nlp.objective.value(
                std::span<const double>(y.data(), y.size()));
          },
          z);
      CHECK((g - g_fd).norm() <= 1e-5 * (1.0 + g.norm()));

      const Eigen::MatrixXd J = jacobian(tp.nlp.equalities, z);
      for (int r = 0; r < tp.nlp.equalities.dim; r += 7) {
        const VectorXd row_fd = testutil::central_gradient(
            [&](const VectorXd& y) {
              Eigen::VectorXd out(tp.nlp.equalities.dim);
              tp.nlp.equalities.value(
                  std::span<const double>(y.data(), y.size()),
                  std::span<double>(out.data(), out.size()));
              return out(r);
            },
            z);
        CHECK((J.row(r).transpose() - row_fd).norm() <=
              1e-5 * (1.0 + J.row(r).norm()));
      }
    }
  }
}
