#pragma once

#include "flexcolloc/bernstein.hpp"

#include <Eigen/Core>

#include <functional>
#include <random>
#include <vector>

namespace testutil {

/// Polynomial with coefficients uniform in [-1, 1] and degree uniform in
/// [0, max_degree].
inline flexcolloc::bernstein::Polynomial random_polynomial(std::mt19937& rng,
                                                           int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> c(deg(rng) + 1);
  for (double& v : c) v = coef(rng);
  return flexcolloc::bernstein::Polynomial(c);
}

/// Monotonic polynomial built by integrating a squared random polynomial,
/// randomly negated, so p' = +-r^2 never changes sign.
inline flexcolloc::bernstein::Polynomial random_monotone(std::mt19937& rng,
                                                         int max_root_degree) {
  const flexcolloc::bernstein::Polynomial r = random_polynomial(rng, max_root_degree);
  const int n = r.degree();
  std::vector<double> sq(2 * n + 1, 0.0);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) sq[i + j] += r.coeffs[i] * r.coeffs[j];
  std::vector<double> integ(sq.size() + 1, 0.0);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double sign = std::uniform_int_distribution<int>(0, 1)(rng) ? 1.0 : -1.0;
  integ[0] = coef(rng);
  for (size_t k = 0; k < sq.size(); ++k) integ[k + 1] = sign * sq[k] / (k + 1);
  return flexcolloc::bernstein::Polynomial(integ);
}

/// Classic fixed-step RK4, the independent dynamics oracle for simulation
/// checks.
inline Eigen::VectorXd rk4(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
    Eigen::VectorXd x, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = f(t, x);
    const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(t + h, x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return x;
}

/// Central difference with the solver's own step rule.
inline Eigen::VectorXd central_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& z) {
  Eigen::VectorXd g(z.size());
  Eigen::VectorXd zp = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z(i)));
    zp(i) = z(i) + h;
    const double fp = f(zp);
    zp(i) = z(i) - h;
    const double fm = f(zp);
    zp(i) = z(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace testutil
