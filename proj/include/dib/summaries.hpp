#pragma once

#include <cstdint>

namespace dib {

/// Sufficient statistics of the current and external samples: sample means
/// and sizes of unit-variance Gaussian data.
struct TwoSampleSummary {
  double theta_hat = 0.0;  // current-data mean
  std::int64_t n = 1;      // current sample size
  double beta_hat = 0.0;   // external-data mean
  std::int64_t m = 1;      // external sample size

  double delta_hat() const { return beta_hat - theta_hat; }
  double pooled() const;
  /// n / (n + m)
  double p_finite() const;
};

/// Builds a summary, throwing std::invalid_argument on n < 1, m < 1 or
/// non-finite means.
TwoSampleSummary make_summary(double theta_hat, std::int64_t n, double beta_hat, std::int64_t m);

/// Throws std::invalid_argument when `s` violates the summary invariants.
void validate(const TwoSampleSummary& s);

struct ConflictStats {
  double delta_hat = 0.0;
  double xi_hat = 0.0;  // delta_hat / sqrt(1/n + 1/m)
  double p_finite = 0.0;
};

ConflictStats conflict_stats(const TwoSampleSummary& s);

/// sqrt(1/n + 1/m), the standard deviation of delta_hat.
double conflict_sd(std::int64_t n, std::int64_t m);

struct BinomialRaw {
  std::int64_t successes = 0;
  std::int64_t trials = 1;

  double rate() const { return static_cast<double>(successes) / static_cast<double>(trials); }
};

/// A rate expressed in units of its plug-in sample SD.
struct StandardizedSummary {
  double value_st = 0.0;
  double sd = 1.0;
  std::int64_t size = 1;

  double raw() const { return value_st * sd; }
};

/// Standardizes a binomial rate by sqrt(rate * (1 - rate)). Throws
/// std::domain_error("zero sample SD") for a rate of 0 or 1.
StandardizedSummary standardize_rate(const BinomialRaw& b);

struct BinomialIngest {
  TwoSampleSummary raw;  // rate-scale means
  StandardizedSummary current;
  StandardizedSummary external;

  /// Summary on the standardized (unit-variance) scale.
  TwoSampleSummary standardized() const;
};

BinomialIngest from_raw_binomial(const BinomialRaw& current, const BinomialRaw& external);

}  // namespace dib
