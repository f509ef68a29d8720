#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dib/estimators.hpp"
#include "dib/summaries.hpp"

namespace dib {

struct SimPlan {
  std::int64_t n = 1000;
  std::int64_t m = 100000;
  double theta = 0.0;
  double delta = 0.0;
  std::size_t replicates = 50000;
  std::uint64_t seed = 1;
  std::vector<EstimatorConfig> estimators;
};

void validate(const SimPlan& plan);

/// Sorted draws of sqrt(n)(T - theta) with summary statistics.
class EmpiricalDist {
 public:
  EmpiricalDist() = default;
  explicit EmpiricalDist(std::vector<double> draws, std::size_t failures = 0);

  const std::vector<double>& draws() const { return draws_; }
  std::size_t size() const { return draws_.size(); }
  std::size_t failures() const { return failures_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }  // unbiased
  double mean_square() const { return mean_square_; }
  /// Linear interpolation between order statistics (type 7).
  double quantile(double prob) const;
  /// Empirical CDF at x.
  double cdf(double x) const;

 private:
  std::vector<double> draws_;
  std::size_t failures_ = 0;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double mean_square_ = 0.0;
};

/// Every estimator in the plan is evaluated on the same (theta_hat, beta_hat)
/// per replicate. OMMSE without a bound conflict uses the plan's delta.
/// Results are keyed by estimator label and do not depend on `workers`.
std::map<std::string, EmpiricalDist> simulate(const SimPlan& plan, unsigned workers = 1);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b);

/// Silverman's rule 0.9 min(sd, IQR/1.34) N^(-1/5).
double silverman_bandwidth(const EmpiricalDist& d);

/// Gaussian-kernel log density at each point of `grid`.
std::vector<double> kde_log_density(const EmpiricalDist& d, const std::vector<double>& grid,
                                    double bandwidth = 0.0, unsigned workers = 1);

enum class BootstrapScheme {
  /// Gaussian resampling of the standardized means around their observed values.
  Parametric,
  /// Binomial resampling of the counts, restandardized on each resample.
  Nonparametric,
};

struct BootstrapResult {
  double lo = 0.0;
  double hi = 0.0;
  double median = 0.0;
  std::size_t resamples = 0;
  std::size_t redrawn = 0;  // degenerate nonparametric resamples replaced
};

/// Percentile interval for AMMSE_S(sens) on the rate scale.
BootstrapResult bootstrap_ci(const BinomialRaw& current, const BinomialRaw& external, double sens,
                             std::size_t resamples, double level, std::uint64_t seed,
                             BootstrapScheme scheme = BootstrapScheme::Parametric, unsigned workers = 1);

}  // namespace dib
