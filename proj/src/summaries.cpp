#include "dib/summaries.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dib {

double TwoSampleSummary::pooled() const {
  const auto nn = static_cast<double>(n);
  const auto mm = static_cast<double>(m);
  return (nn * theta_hat + mm * beta_hat) / (nn + mm);
}

double TwoSampleSummary::p_finite() const {
  return static_cast<double>(n) / static_cast<double>(n + m);
}

void validate(const TwoSampleSummary& s) {
  if (s.n < 1 || s.m < 1) {
    throw std::invalid_argument("summary: sample sizes must be positive (n=" + std::to_string(s.n) +
                                ", m=" + std::to_string(s.m) + ")");
  }
  if (!std::isfinite(s.theta_hat) || !std::isfinite(s.beta_hat) ||
      !std::isfinite(s.beta_hat - s.theta_hat)) {
    throw std::invalid_argument("summary: means must be finite");
  }
}

TwoSampleSummary make_summary(double theta_hat, std::int64_t n, double beta_hat, std::int64_t m) {
  TwoSampleSummary s{theta_hat, n, beta_hat, m};
  validate(s);
  return s;
}

double conflict_sd(std::int64_t n, std::int64_t m) {
  return std::sqrt(1.0 / static_cast<double>(n) + 1.0 / static_cast<double>(m));
}

ConflictStats conflict_stats(const TwoSampleSummary& s) {
  validate(s);
  const double d = s.delta_hat();
  return ConflictStats{d, d / conflict_sd(s.n, s.m), s.p_finite()};
}

StandardizedSummary standardize_rate(const BinomialRaw& b) {
  if (b.trials < 1) throw std::invalid_argument("binomial: trials must be positive");
  if (b.successes < 0 || b.successes > b.trials) {
    throw std::invalid_argument("binomial: successes must lie in [0, trials]");
  }
  const double rate = b.rate();
  const double sd = std::sqrt(rate * (1.0 - rate));
  if (!(sd > 0.0)) throw std::domain_error("zero sample SD");
  return StandardizedSummary{rate / sd, sd, b.trials};
}

TwoSampleSummary BinomialIngest::standardized() const {
  return TwoSampleSummary{current.value_st, current.size, external.value_st, external.size};
}

BinomialIngest from_raw_binomial(const BinomialRaw& current, const BinomialRaw& external) {
  BinomialIngest out;
  out.current = standardize_rate(current);
  out.external = standardize_rate(external);
  out.raw = make_summary(current.rate(), current.trials, external.rate(), external.trials);
  return out;
}

}  // namespace dib
