#pragma once

#include <string>
#include <vector>

namespace flexcolloc::bernstein {

/// Univariate polynomial in monomial coefficients, p(t) = c[0] + c[1] t + ... .
/// The coefficient list is never empty; trailing zeros are allowed, so
/// degree() is "at most" the true degree.
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() : coeffs{0.0} {}
  explicit Polynomial(std::vector<double> c);

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator()(double t) const;  // Horner
  Polynomial derivative() const;
};

/// Coefficient vector in the Bernstein basis of degree coeffs.size()-1.
/// Evaluation is over the unit interval; b(0) == coeffs.front() and
/// b(1) == coeffs.back().
struct BernsteinForm {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator()(double t) const;  // de Casteljau
};

/// Convex-hull range bounds obtained from Bernstein coefficients, with flags
/// saying whether each side is attained at an interval endpoint (and hence
/// equals the exact extremum of the polynomial).
struct HullBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool tight_lower = false;
  bool tight_upper = false;
};

/// Strictly increasing breakpoints s_0 < ... < s_m covering a host interval.
struct Partition {
  std::vector<double> breakpoints;

  int pieces() const { return static_cast<int>(breakpoints.size()) - 1; }
};

enum class Monotonicity { NonDecreasing, NonIncreasing, Neither };

std::string to_string(Monotonicity m);

/// Binomial coefficient by multiplicative recurrence in double precision.
double binomial(int n, int k);

/// Bernstein basis polynomial b_{n,j}(t) = C(n,j) t^j (1-t)^(n-j).
/// Throws std::out_of_range for bad j and std::domain_error for t outside
/// [0, 1].
double basis_eval(int n, int j, double t);

/// Change of basis from monomial to Bernstein coefficients (same degree).
BernsteinForm to_bernstein(const Polynomial& p);

/// Inverse change of basis.
Polynomial to_monomial(const BernsteinForm& b);

/// Re-express b in the Bernstein basis of a higher degree; the polynomial is
/// unchanged. Throws std::invalid_argument if target_degree < b.degree().
BernsteinForm degree_elevate(const BernsteinForm& b, int target_degree);

/// Range bounds of the polynomial over [0, 1] from the coefficient hull.
/// A side is flagged tight when the extreme coefficient sits at index 0 or
/// at the last index, up to a relative tolerance of 1e-12.
HullBounds hull_bounds(const BernsteinForm& b);

/// Sign classification of p' over [a, b], using the real eigenvalues of the
/// companion matrix of p' and sign checks between consecutive roots.
/// Constant polynomials report NonDecreasing.
Monotonicity monotonicity(const Polynomial& p, double a, double b);

/// The polynomial q(s) = p(a + h s), so that q on [0, 1] traces p on
/// [a, a + h]. Throws std::invalid_argument for h <= 0.
Polynomial rescale_to_unit(const Polynomial& p, double a, double h);

/// Greedy left-to-right search for a partition of [a, b] on which p is
/// tightly bounded piece by piece. From each left endpoint the step starts
/// at the full remainder and is halved until the rescaled piece has both
/// hull bounds tight. Requires p monotonic on [a, b].
///
/// Throws std::invalid_argument for non-monotonic input and
/// std::runtime_error when more than max_pieces sub-intervals would be
/// needed.
Partition tight_partition(const Polynomial& p, double a, double b,
                          int max_pieces = 64);

}  // namespace flexcolloc::bernstein
