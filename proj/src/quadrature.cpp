#include "flexcolloc/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace flexcolloc::quadrature {

namespace {

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 tables (QUADPACK dqk15 values).
// xgk has the positive abscissae of the 15-point Kronrod rule; the even
// entries (0-based: 1, 3, 5) are the positive Gauss-7 abscissae.

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double cabs(double x) { return x < 0.0 ? -x : x; }

constexpr double powi(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Rule applied to t^k on [-1, 1]; the abscissae are symmetric so odd powers
// vanish identically.
constexpr double kronrod_moment(int k) {
  double acc = kWgk[7] * powi(0.0, k);
  if (k == 0) acc = kWgk[7];
  for (int i = 0; i < 7; ++i) acc += kWgk[i] * (powi(kXgk[i], k) + powi(-kXgk[i], k));
  return acc;
}

constexpr double gauss_moment(int k) {
  double acc = kWg[3] * (k == 0 ? 1.0 : powi(0.0, k));
  for (int i = 0; i < 3; ++i)
    acc += kWg[i] * (powi(kXgk[2 * i + 1], k) + powi(-kXgk[2 * i + 1], k));
  return acc;
}

constexpr bool tables_integrate_exactly() {
  for (int k = 0; k <= 22; ++k) {
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    if (cabs(kronrod_moment(k) - exact) > 5e-14) return false;
  }
  for (int k = 0; k <= 13; ++k) {
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    if (cabs(gauss_moment(k) - exact) > 5e-14) return false;
  }
  return true;
}

constexpr std::pair<double, double> legendre7(double x) {
  double pm = 1.0, pk = x, dm = 0.0, dk = 1.0;
  for (int k = 2; k <= 7; ++k) {
    const double pn = ((2 * k - 1) * x * pk - (k - 1) * pm) / k;
    const double dn = dm + (2 * k - 1) * pk;
    pm = pk; pk = pn; dm = dk; dk = dn;
  }
  return {pk, dk};
}

constexpr bool gauss_abscissae_are_p7_roots() {
  for (int i = 0; i < 4; ++i) {
    double x = (i < 3) ? kXgk[2 * i + 1] : 0.0;
    for (int it = 0; it < 8; ++it) {
      const auto [p, dp] = legendre7(x);
      x -= p / dp;
    }
    const double ref = (i < 3) ? kXgk[2 * i + 1] : 0.0;
    if (cabs(x - ref) > 5e-16) return false;
  }
  return true;
}

static_assert(tables_integrate_exactly(), "Gauss-Kronrod 7-15 tables are inconsistent");
static_assert(gauss_abscissae_are_p7_roots(), "embedded Gauss abscissae are not Legendre roots");

// ---------------------------------------------------------------------------

struct PanelResult {
  double integral;
  double error;
  double resabs;
};

PanelResult qk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);

  const double fc = f(center);
  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  double fv[7][2];
  for (int i = 0; i < 7; ++i) {
    const double absc = hlgth * kXgk[i];
    fv[i][0] = f(center - absc);
    fv[i][1] = f(center + absc);
    const double fsum = fv[i][0] + fv[i][1];
    resk += kWgk[i] * fsum;
    resabs += kWgk[i] * (std::abs(fv[i][0]) + std::abs(fv[i][1]));
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(fv[i][0] - reskh) + std::abs(fv[i][1] - reskh));

  const double integral = resk * hlgth;
  resasc *= std::abs(hlgth);
  resabs *= std::abs(hlgth);
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(err, 50.0 * eps * resabs);
  if (!std::isfinite(integral))
    throw std::runtime_error("integrate_adaptive: non-finite integrand value");
  return {integral, err, resabs};
}

}  // namespace

std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double pm = 1.0, pk = x;
  for (int k = 2; k <= n; ++k) {
    const double pn = ((2 * k - 1) * x * pk - (k - 1) * pm) / k;
    pm = pk;
    pk = pn;
  }
  double dk;
  if (std::abs(x) < 1.0 - 1e-12) {
    dk = n * (pm - x * pk) / (1.0 - x * x);
  } else {
    // P'_n(1) = n(n+1)/2 and P'_n(-1) = (-1)^(n-1) n(n+1)/2.
    dk = 0.5 * n * (n + 1) * ((x > 0.0) ? 1.0 : ((n % 2 == 0) ? -1.0 : 1.0));
  }
  return {pk, dk};
}

NodeSet lgr_nodes(int n) {
  if (n < 1) throw std::invalid_argument("lgr_nodes needs n >= 1");
  NodeSet set;
  set.kind = NodeKind::LGR;
  set.nodes.assign(1, -1.0);
  set.weights.assign(1, 2.0 / (static_cast<double>(n) * n));
  if (n == 1) {
    set.weights[0] = 2.0;
    return set;
  }

  // Interior nodes are the roots of the Jacobi(0,1) polynomial of degree n-1,
  // obtained Golub-Welsch style from its symmetric recurrence matrix.
  const int m = n - 1;
  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) diag(k) = 1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < m; ++k)
    sub(k - 1) = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  std::vector<double> interior(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(interior.begin(), interior.end());

  for (double& x : interior) {
    for (int it = 0; it < 2; ++it) {  // Newton polish on P_{n-1} + P_n
      const auto [pa, da] = legendre(n - 1, x);
      const auto [pb, db] = legendre(n, x);
      x -= (pa + pb) / (da + db);
    }
  }

  for (double x : interior) {
    const double p = legendre(n - 1, x).first;
    set.nodes.push_back(x);
    set.weights.push_back((1.0 - x) / (static_cast<double>(n) * n * p * p));
  }
  return set;
}

NodeSet lgl_nodes(int m) {
  if (m < 2) throw std::invalid_argument("lgl_nodes needs m >= 2");
  NodeSet set;
  set.kind = NodeKind::LGL;
  const int n = m - 1;  // polynomial order: nodes are +-1 and roots of P'_n

  std::vector<double> interior;
  const int k = m - 2;
  if (k > 0) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd sub(std::max(k - 1, 0));
    for (int j = 1; j < k; ++j)
      sub(j - 1) = std::sqrt(j * (j + 2.0) / ((2.0 * j + 1.0) * (2.0 * j + 3.0)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    interior.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    std::sort(interior.begin(), interior.end());

    for (double& x : interior) {
      for (int it = 0; it < 2; ++it) {
        const auto [p, dp] = legendre(n, x);
        const double ddp = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
        x -= dp / ddp;
      }
    }
    // The rule is symmetric; average out eigenvalue round-off.
    for (int j = 0; j < k / 2; ++j) {
      const double v = 0.5 * (interior[j] - interior[k - 1 - j]);
      interior[j] = v;
      interior[k - 1 - j] = -v;
    }
    if (k % 2 == 1) interior[k / 2] = 0.0;
  }

  set.nodes.push_back(-1.0);
  for (double x : interior) set.nodes.push_back(x);
  set.nodes.push_back(1.0);

  for (double x : set.nodes) {
    const double p = legendre(n, x).first;
    set.weights.push_back(2.0 / (m * (m - 1.0) * p * p));
  }
  return set;
}

InterpolationGrid make_grid(std::vector<double> points) {
  InterpolationGrid grid;
  grid.points = std::move(points);
  const int m = grid.size();
  grid.bary.assign(m, 1.0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      if (i != j) grid.bary[j] /= (grid.points[j] - grid.points[i]);
  double scale = 0.0;
  for (double w : grid.bary) scale = std::max(scale, std::abs(w));
  for (double& w : grid.bary) w /= scale;

  grid.diff.resize(m, m);
  for (int j = 0; j < m; ++j) {
    double rowsum = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      grid.diff(j, i) = (grid.bary[i] / grid.bary[j]) / (grid.points[j] - grid.points[i]);
      rowsum += grid.diff(j, i);
    }
    grid.diff(j, j) = -rowsum;
  }
  return grid;
}

InterpolationGrid state_grid(int n) {
  NodeSet lgr = lgr_nodes(n);
  lgr.nodes.push_back(1.0);
  return make_grid(std::move(lgr.nodes));
}

InterpolationGrid input_grid(int n) { return make_grid(lgr_nodes(n).nodes); }

double interpolate(const InterpolationGrid& grid, std::span<const double> values,
                   double tau) {
  if (static_cast<int>(values.size()) != grid.size())
    throw std::invalid_argument("interpolate: values length must match the grid");
  double num = 0.0, den = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double d = tau - grid.points[j];
    if (std::abs(d) < 1e-14) return values[j];
    const double w = grid.bary[j] / d;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                  double b, double rel_tol, double abs_tol,
                                  int max_splits) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive needs a < b");

  struct Segment {
    double a, b, integral, error;
  };
  auto worse = [](const Segment& x, const Segment& y) { return x.error < y.error; };
  std::priority_queue<Segment, std::vector<Segment>, decltype(worse)> heap(worse);

  PanelResult first = qk15(f, a, b);
  heap.push({a, b, first.integral, first.error});
  double total = first.integral;
  double total_err = first.error;
  int evaluations = 15;
  int splits = 0;

  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (splits >= max_splits)
      throw std::runtime_error("integrate_adaptive: did not converge within max_splits");
    const Segment seg = heap.top();
    heap.pop();
    const double mid = 0.5 * (seg.a + seg.b);
    if (mid <= seg.a || mid >= seg.b)
      throw std::runtime_error("integrate_adaptive: interval underflow");
    const PanelResult left = qk15(f, seg.a, mid);
    const PanelResult right = qk15(f, mid, seg.b);
    total += left.integral + right.integral - seg.integral;
    total_err += left.error + right.error - seg.error;
    heap.push({seg.a, mid, left.integral, left.error});
    heap.push({mid, seg.b, right.integral, right.error});
    evaluations += 30;
    ++splits;
  }

  // Re-sum segments left to right so the result does not depend on the order
  // in which the heap was refined.
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(),
            [](const Segment& x, const Segment& y) { return x.a < y.a; });
  IntegralResult out{};
  for (const Segment& s : segs) {
    out.value += s.integral;
    out.error += s.error;
  }
  out.evaluations = evaluations;
  return out;
}

}  // namespace flexcolloc::quadrature
