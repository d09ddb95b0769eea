#include "flexcolloc/bernstein.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flexcolloc::bernstein {

namespace {

constexpr double kCoeffTol = 1e-12;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Real roots of p in the open interval (a, b), from the eigenvalues of the
// companion matrix of the trimmed coefficient vector.
std::vector<double> real_roots_in(const Polynomial& p, double a, double b) {
  std::vector<double> c = p.coeffs;
  const double scale = max_abs(c);
  while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * std::max(1.0, scale))
    c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<double> roots;
  if (d < 1) return roots;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[i] / c[d];

  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  const double span = b - a;
  for (int i = 0; i < d; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real()))) continue;
    const double r = z.real();
    if (r > a + 1e-14 * span && r < b - 1e-14 * span) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
}

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs.size() == 1) return Polynomial{{0.0}};
  std::vector<double> d(coeffs.size() - 1);
  for (size_t k = 1; k < coeffs.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs[k];
  return Polynomial{std::move(d)};
}

double BernsteinForm::operator()(double t) const {
  std::vector<double> work = coeffs;
  for (size_t level = work.size() - 1; level > 0; --level)
    for (size_t j = 0; j < level; ++j)
      work[j] = (1.0 - t) * work[j] + t * work[j + 1];
  return work[0];
}

std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::NonDecreasing: return "non-decreasing";
    case Monotonicity::NonIncreasing: return "non-increasing";
    default: return "neither";
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * static_cast<double>(n - k + i) / i;
  return result;
}

double basis_eval(int n, int j, double t) {
  if (n < 0 || j < 0 || j > n) throw std::out_of_range("basis index outside 0..n");
  if (t < 0.0 || t > 1.0) throw std::domain_error("basis argument outside [0, 1]");
  return binomial(n, j) * std::pow(t, j) * std::pow(1.0 - t, n - j);
}

BernsteinForm to_bernstein(const Polynomial& p) {
  const int n = p.degree();
  std::vector<double> beta(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    double acc = 0.0;
    for (int k = 0; k <= j; ++k) acc += p.coeffs[k] * binomial(j, k) / binomial(n, k);
    beta[j] = acc;
  }
  return BernsteinForm{std::move(beta)};
}

Polynomial to_monomial(const BernsteinForm& b) {
  const int n = b.degree();
  std::vector<double> alpha(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    // alpha_k = sum_j (-1)^(k-j) C(n,k) C(k,j) beta_j
    double acc = 0.0;
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j <= k; ++j) {
      acc += sign * binomial(n, k) * binomial(k, j) * b.coeffs[j];
      sign = -sign;
    }
    alpha[k] = acc;
  }
  return Polynomial{std::move(alpha)};
}

BernsteinForm degree_elevate(const BernsteinForm& b, int target_degree) {
  if (target_degree < b.degree())
    throw std::invalid_argument("degree_elevate cannot lower the degree");
  if (target_degree == b.degree()) return b;
  Polynomial p = to_monomial(b);
  p.coeffs.resize(target_degree + 1, 0.0);
  return to_bernstein(p);
}

HullBounds hull_bounds(const BernsteinForm& b) {
  const auto& beta = b.coeffs;
  const double lo = *std::min_element(beta.begin(), beta.end());
  const double hi = *std::max_element(beta.begin(), beta.end());
  const double tol = kCoeffTol * std::max(1.0, max_abs(beta));
  HullBounds h;
  h.lower = lo;
  h.upper = hi;
  h.tight_lower = std::min(beta.front(), beta.back()) <= lo + tol;
  h.tight_upper = std::max(beta.front(), beta.back()) >= hi - tol;
  return h;
}

Monotonicity monotonicity(const Polynomial& p, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("degenerate interval");
  const Polynomial dp = p.derivative();
  if (max_abs(dp.coeffs) == 0.0) return Monotonicity::NonDecreasing;

  std::vector<double> pts = real_roots_in(dp, a, b);
  pts.insert(pts.begin(), a);
  pts.push_back(b);

  std::vector<double> samples;
  samples.reserve(pts.size() - 1);
  for (size_t i = 0; i + 1 < pts.size(); ++i) samples.push_back(dp(0.5 * (pts[i] + pts[i + 1])));

  const double eps = kCoeffTol * std::max(1.0, max_abs(samples));
  bool has_pos = false, has_neg = false;
  for (double s : samples) {
    if (s > eps) has_pos = true;
    if (s < -eps) has_neg = true;
  }
  if (has_pos && has_neg) return Monotonicity::Neither;
  if (has_neg) return Monotonicity::NonIncreasing;
  return Monotonicity::NonDecreasing;
}

Polynomial rescale_to_unit(const Polynomial& p, double a, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rescale_to_unit needs h > 0");
  const int n = p.degree();
  // Taylor shift to a, then scale the argument by h.
  std::vector<double> shifted(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    double acc = 0.0;
    for (int m = k; m <= n; ++m) acc += p.coeffs[m] * binomial(m, k) * std::pow(a, m - k);
    shifted[k] = acc;
  }
  double hk = 1.0;
  for (int k = 0; k <= n; ++k) {
    shifted[k] *= hk;
    hk *= h;
  }
  return Polynomial{std::move(shifted)};
}

Partition tight_partition(const Polynomial& p, double a, double b, int max_pieces) {
  if (monotonicity(p, a, b) == Monotonicity::Neither)
    throw std::invalid_argument("tight_partition requires a monotonic polynomial");

  Partition part;
  part.breakpoints.push_back(a);
  double left = a;
  while (left < b) {
    double h = b - left;
    bool accepted = false;
    for (int halvings = 0; halvings < 64; ++halvings) {
      const HullBounds hb = hull_bounds(to_bernstein(rescale_to_unit(p, left, h)));
      if (hb.tight_lower && hb.tight_upper) {
        accepted = true;
        break;
      }
      h *= 0.5;
    }
    if (!accepted)
      throw std::runtime_error("tight_partition: no tight step found before underflow");
    if (static_cast<int>(part.breakpoints.size()) > max_pieces)
      throw std::runtime_error("tight_partition: subdivision budget exceeded");
    left = (h == b - left) ? b : left + h;
    part.breakpoints.push_back(left);
  }
  return part;
}

}  // namespace flexcolloc::bernstein
