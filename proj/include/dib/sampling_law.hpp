#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "dib/estimators.hpp"
#include "dib/numerics.hpp"

namespace dib {

/// Exact finite-sample law of a location-equivariant estimator under
/// theta_hat ~ N(theta, 1/n), beta_hat ~ N(theta + delta, 1/m).
///
/// Writing u for the pooled mean and x for delta_hat, u ~ N(theta + q delta,
/// 1/(n+m)) and x ~ N(delta, 1/n + 1/m) are independent, and every estimator
/// here satisfies T = u + D(x) with D(x) = T(-q x, p x). All integrals over
/// the bivariate sampling law therefore reduce to one dimension in x.
class SamplingLaw {
 public:
  SamplingLaw(EstimatorConfig config, std::int64_t n, std::int64_t m);

  /// D(x): estimator value at the summary whose pooled mean is zero and
  /// whose conflict estimate is x. Memoized for the LSTP optimizer.
  double offset(double x) const;

  /// E[(T - theta)^2] at conflict delta (independent of theta).
  double mse(double delta, const QuadratureOptions& opts = mse_tolerance()) const;
  /// Pr(T - theta <= t) at conflict delta.
  double cdf(double t, double delta) const;
  /// Pr(T - theta > t) at conflict delta, computed directly for small tails.
  double sf(double t, double delta) const;
  /// Inverse of cdf in t.
  double quantile(double prob, double delta) const;

  const EstimatorConfig& config() const { return config_; }
  std::int64_t n() const { return n_; }
  std::int64_t m() const { return m_; }

  static QuadratureOptions mse_tolerance() { return {1e-16, 1e-10, 18}; }

 private:
  double tail(double t, double delta, bool upper) const;

  EstimatorConfig config_;
  std::int64_t n_;
  std::int64_t m_;
  double p_;
  double q_;
  double sd_x_;
  std::vector<double> breaks_;
  bool memoize_;
  mutable std::shared_ptr<std::mutex> memo_mutex_;
  mutable std::shared_ptr<std::map<double, double>> memo_;
};

}  // namespace dib
