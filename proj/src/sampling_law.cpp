#include "dib/sampling_law.hpp"

#include <algorithm>
#include <cmath>

#include "dib/summaries.hpp"

namespace dib {

namespace {

constexpr double kConflictSpan = 14.0;  // in conflict SDs around delta
constexpr std::size_t kMemoLimit = 1u << 20;

}  // namespace

SamplingLaw::SamplingLaw(EstimatorConfig config, std::int64_t n, std::int64_t m)
    : config_(std::move(config)), n_(n), m_(m) {
  validate(make_summary(0.0, n, 0.0, m));
  validate(config_);
  p_ = static_cast<double>(n) / static_cast<double>(n + m);
  q_ = static_cast<double>(m) / static_cast<double>(n + m);
  sd_x_ = conflict_sd(n, m);
  breaks_ = conflict_breakpoints(config_, n, m);
  memoize_ = std::holds_alternative<est::Lstp>(config_);
  if (memoize_) {
    memo_mutex_ = std::make_shared<std::mutex>();
    memo_ = std::make_shared<std::map<double, double>>();
  }
}

double SamplingLaw::offset(double x) const {
  if (memoize_) {
    std::lock_guard<std::mutex> lock(*memo_mutex_);
    if (auto it = memo_->find(x); it != memo_->end()) return it->second;
  }
  const TwoSampleSummary s{-q_ * x, n_, p_ * x, m_};
  const double value = estimate(config_, s).theta_est;
  if (!std::isfinite(value)) {
    throw NumericalError("estimator " + label(config_) + " is not finite at delta_hat=" +
                         format_double(x));
  }
  if (memoize_) {
    std::lock_guard<std::mutex> lock(*memo_mutex_);
    if (memo_->size() >= kMemoLimit) memo_->clear();
    memo_->emplace(x, value);
  }
  return value;
}

double SamplingLaw::mse(double delta, const QuadratureOptions& opts) const {
  if (!std::isfinite(delta)) throw std::invalid_argument("mse: conflict must be finite");
  const auto* ommse = std::get_if<est::Ommse>(&config_);
  if (ommse && !ommse->delta_true) {
    return SamplingLaw(bind_conflict(config_, delta), n_, m_).mse(delta, opts);
  }
  const double lo = delta - kConflictSpan * sd_x_;
  const double hi = delta + kConflictSpan * sd_x_;
  std::vector<double> breaks = breaks_;
  breaks.push_back(delta);
  auto integrand = [&](double x) {
    const double bias = q_ * delta + offset(x);
    return bias * bias * normal_pdf((x - delta) / sd_x_) / sd_x_;
  };
  const auto r = integrate(integrand, lo, hi, breaks, opts);
  return 1.0 / static_cast<double>(n_ + m_) + r.value;
}

double SamplingLaw::tail(double t, double delta, bool upper) const {
  const auto* ommse = std::get_if<est::Ommse>(&config_);
  if (ommse && !ommse->delta_true) {
    return SamplingLaw(bind_conflict(config_, delta), n_, m_).tail(t, delta, upper);
  }
  const double root = std::sqrt(static_cast<double>(n_ + m_));
  const double lo = delta - kConflictSpan * sd_x_;
  const double hi = delta + kConflictSpan * sd_x_;
  std::vector<double> breaks = breaks_;
  breaks.push_back(delta);
  auto integrand = [&](double x) {
    const double z = root * (t - q_ * delta - offset(x));
    const double prob = upper ? normal_ccdf(z) : normal_cdf(z);
    return prob * normal_pdf((x - delta) / sd_x_) / sd_x_;
  };
  const auto r = integrate(integrand, lo, hi, breaks, {1e-13, 1e-10, 18});
  return std::clamp(r.value, 0.0, 1.0);
}

double SamplingLaw::cdf(double t, double delta) const { return tail(t, delta, false); }

double SamplingLaw::sf(double t, double delta) const { return tail(t, delta, true); }

double SamplingLaw::quantile(double prob, double delta) const {
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("quantile: probability must lie in (0,1)");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  double lo = -(std::abs(delta) + 8.0 * scale);
  double hi = std::abs(delta) + 8.0 * scale;
  // Upper probabilities go through the survival function, which keeps
  // accuracy in the tail: cdf(t) - prob == (1 - prob) - sf(t).
  auto h = [&](double t) { return prob < 0.5 ? cdf(t, delta) - prob : (1.0 - prob) - sf(t, delta); };
  for (int i = 0; i < 60 && h(lo) > 0.0; ++i) lo -= (hi - lo);
  for (int i = 0; i < 60 && h(hi) < 0.0; ++i) hi += (hi - lo);
  return find_root(h, lo, hi, 1e-13 * scale);
}

}  // namespace dib
