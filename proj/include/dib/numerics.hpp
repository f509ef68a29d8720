#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dib {

/// Raised when a numerical routine cannot reach its requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far into the tail.
double normal_ccdf(double x);
double normal_quantile(double prob);

/// Nodes and weights for E[f(Z)], Z ~ N(0,1). Weights sum to one.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Probabilists' Gauss-Hermite rule with `count` nodes, computed once per
/// count and cached.
const GaussHermiteRule& gauss_hermite(std::size_t count);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  unsigned max_depth = 18;
};

/// Adaptive 15-point Gauss-Kronrod over [a, b], split at every breakpoint
/// strictly inside the interval. Throws NumericalError when the error
/// estimate stays above tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, std::span<const double> breakpoints = {},
                           const QuadratureOptions& opts = {});

/// Neumaier-compensated sum; order of `values` fully determines the result.
double compensated_sum(std::span<const double> values);

/// Global minimizer of a 1-D function on [lo, hi]: a uniform scan with
/// `grid_points` nodes picks the basin, Brent refines inside the two
/// neighbouring cells.
double minimize_scanned(const std::function<double(double)>& f, double lo,
                        double hi, std::size_t grid_points, double x_tol);

/// Root of a monotone-crossing function on [lo, hi] (TOMS 748). Throws
/// NumericalError if f(lo) and f(hi) have the same sign.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol = 1e-12);

/// Shortest round-trip decimal form ("0.4", "1e-06", "inf").
std::string format_double(double x);

}  // namespace dib
