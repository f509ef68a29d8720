#include "dib/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace dib {

namespace {

const boost::math::normal_distribution<double> kStdNormal{0.0, 1.0};

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// probabilists' Hermite polynomials (zero diagonal, off-diagonal sqrt(k)),
// weights the squared first components of the unit eigenvectors. Implicit
// QL with Wilkinson shifts, tracking only the first eigenvector row.
GaussHermiteRule build_gauss_hermite(std::size_t count) {
  const int n = static_cast<int>(count);
  std::vector<double> d(count, 0.0), e(count, 0.0), z(count, 0.0);
  for (int i = 0; i + 1 < n; ++i) e[i] = std::sqrt(static_cast<double>(i + 1));
  z[0] = 1.0;
  for (int l = 0; l < n; ++l) {
    for (int iter = 0;; ++iter) {
      int m = l;
      for (; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (iter == 60) throw NumericalError("gauss_hermite: eigenvalue iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      for (; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (r == 0.0 && i >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::vector<int> order(count);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  GaussHermiteRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = d[order[i]];
    rule.weights[i] = z[order[i]] * z[order[i]];
  }
  // restore exact symmetry
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& xk = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = gauss<double, 7>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * wk[0];
  double gaus = fc * wg[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fsum = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * fsum;
    if (i % 2 == 0) gaus += wg[i / 2] * fsum;
  }
  return Panel{a, b, kron * h, std::abs((kron - gaus) * h)};
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_ccdf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("normal_quantile: probability must lie in (0,1)");
  }
  return boost::math::quantile(kStdNormal, prob);
}

const GaussHermiteRule& gauss_hermite(std::size_t count) {
  if (count < 1) throw std::invalid_argument("gauss_hermite: count must be positive");
  static std::mutex mu;
  static std::map<std::size_t, GaussHermiteRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(count);
  if (it == cache.end()) it = cache.emplace(count, build_gauss_hermite(count)).first;
  return it->second;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& opts) {
  if (!(a < b)) {
    if (a == b) return {};
    throw std::invalid_argument("integrate: lower bound exceeds upper bound");
  }
  std::vector<double> edges{a};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);

  std::priority_queue<Panel> panels;
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    panels.push(gk15(f, edges[i], edges[i + 1]));
    evals += 15;
  }
  auto totals = [&]() {
    std::vector<Panel> all;
    auto copy = panels;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    std::vector<double> vals, errs;
    for (const auto& p : all) {
      vals.push_back(p.value);
      errs.push_back(p.error);
    }
    return std::pair{compensated_sum(vals), compensated_sum(errs)};
  };

  const std::size_t max_panels = std::size_t{1} << opts.max_depth;
  double value = 0.0;
  double error = 0.0;
  // Running totals drift, so they are recomputed exactly once the loop stops.
  {
    auto [v, e] = totals();
    value = v;
    error = e;
  }
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value)) &&
         panels.size() < max_panels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      panels.push(worst);
      break;
    }
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    evals += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  auto [v, e] = totals();
  if (!std::isfinite(v)) {
    throw NumericalError("integrate: non-finite integrand on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  }
  if (e > std::max(opts.abs_tol, opts.rel_tol * std::abs(v))) {
    std::ostringstream msg;
    msg << "integrate: no convergence on [" << a << ", " << b << "], achieved error " << e;
    throw NumericalError(msg.str());
  }
  return QuadratureResult{v, e, evals};
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double minimize_scanned(const std::function<double(double)>& f, double lo, double hi,
                        std::size_t grid_points, double x_tol) {
  if (grid_points < 3) throw std::invalid_argument("minimize_scanned: need at least 3 grid points");
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_val = f(lo);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double b = lo + step * static_cast<double>(std::min(best + 1, grid_points - 1));
  const int bits = std::max(8, static_cast<int>(-std::log2(x_tol / std::max(1.0, b - a))));
  boost::uintmax_t iters = 200;
  auto [x, fx] = boost::math::tools::brent_find_minima(f, a, b, std::min(bits, 52), iters);
  const double grid_x = lo + step * static_cast<double>(best);
  return fx <= best_val ? x : grid_x;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << lo << ", " << hi << "]";
    throw NumericalError(msg.str());
  }
  boost::uintmax_t iters = 300;
  auto tol = [x_tol](double l, double r) { return std::abs(r - l) <= x_tol; };
  auto [l, r] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (l + r);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace dib
