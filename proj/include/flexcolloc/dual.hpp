#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cmath>
#include <utility>
#include <vector>

namespace flexcolloc {

/// Forward-mode scalar carrying a dense gradient. An empty gradient vector
/// means "constant": it stands for a zero gradient of whatever dimension the
/// surrounding expression uses, which keeps literals cheap.
struct Dual {
  double v = 0.0;
  Eigen::VectorXd g;

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Dual(double value, Eigen::VectorXd grad) : v(value), g(std::move(grad)) {}

  /// The index-th of dim independent variables.
  static Dual variable(double value, int dim, int index) {
    Dual d(value, Eigen::VectorXd::Zero(dim));
    d.g(index) = 1.0;
    return d;
  }

  /// Gradient as a dense vector of the given dimension.
  Eigen::VectorXd gradient(int dim) const {
    if (g.size() == 0) return Eigen::VectorXd::Zero(dim);
    assert(g.size() == dim);
    return g;
  }

  Dual& operator+=(const Dual& o);
  Dual& operator-=(const Dual& o);
  Dual& operator*=(const Dual& o);
  Dual& operator/=(const Dual& o);
};

namespace detail {

/// ca * a + cb * b with empty vectors standing for zero.
inline Eigen::VectorXd axpby(double ca, const Eigen::VectorXd& a, double cb,
                             const Eigen::VectorXd& b) {
  if (a.size() == 0) {
    if (b.size() == 0) return {};
    return cb * b;
  }
  if (b.size() == 0) return ca * a;
  assert(a.size() == b.size());
  return ca * a + cb * b;
}

inline Eigen::VectorXd scale(double c, const Eigen::VectorXd& a) {
  if (a.size() == 0) return {};
  return c * a;
}

}  // namespace detail

inline Dual operator+(const Dual& a, const Dual& b) {
  return {a.v + b.v, detail::axpby(1.0, a.g, 1.0, b.g)};
}
inline Dual operator-(const Dual& a, const Dual& b) {
  return {a.v - b.v, detail::axpby(1.0, a.g, -1.0, b.g)};
}
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v, detail::axpby(b.v, a.g, a.v, b.g)};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  return {a.v * inv, detail::axpby(inv, a.g, -a.v * inv * inv, b.g)};
}
inline Dual operator-(const Dual& a) { return {-a.v, detail::scale(-1.0, a.g)}; }
inline Dual operator+(const Dual& a) { return a; }

inline Dual& Dual::operator+=(const Dual& o) { return *this = *this + o; }
inline Dual& Dual::operator-=(const Dual& o) { return *this = *this - o; }
inline Dual& Dual::operator*=(const Dual& o) { return *this = *this * o; }
inline Dual& Dual::operator/=(const Dual& o) { return *this = *this / o; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }

inline Dual sin(const Dual& a) {
  return {std::sin(a.v), detail::scale(std::cos(a.v), a.g)};
}
inline Dual cos(const Dual& a) {
  return {std::cos(a.v), detail::scale(-std::sin(a.v), a.g)};
}
inline Dual tan(const Dual& a) {
  const double c = std::cos(a.v);
  return {std::tan(a.v), detail::scale(1.0 / (c * c), a.g)};
}
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return {e, detail::scale(e, a.g)};
}
inline Dual log(const Dual& a) {
  return {std::log(a.v), detail::scale(1.0 / a.v, a.g)};
}
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, detail::scale(0.5 / s, a.g)};
}
inline Dual pow(const Dual& a, double p) {
  return {std::pow(a.v, p), detail::scale(p * std::pow(a.v, p - 1.0), a.g)};
}
inline Dual abs(const Dual& a) {
  return {std::abs(a.v), detail::scale(a.v < 0.0 ? -1.0 : 1.0, a.g)};
}
inline Dual square(const Dual& a) {
  return {a.v * a.v, detail::scale(2.0 * a.v, a.g)};
}
inline double value(const Dual& a) { return a.v; }
inline double value(double a) { return a; }

/// Vector of duals seeded as the independent variables for z.
inline std::vector<Dual> seed(const Eigen::VectorXd& z) {
  std::vector<Dual> out;
  out.reserve(z.size());
  for (int i = 0; i < z.size(); ++i)
    out.push_back(Dual::variable(z(i), static_cast<int>(z.size()), i));
  return out;
}

}  // namespace flexcolloc
