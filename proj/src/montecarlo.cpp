#include "dib/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dib/numerics.hpp"
#include "dib/rng.hpp"

namespace dib {

namespace {

constexpr std::uint64_t kSimulationStream = 0x53494dULL;
constexpr std::uint64_t kBootstrapStream = 0x424f4f54ULL;

}  // namespace

void validate(const SimPlan& plan) {
  validate(make_summary(plan.theta, plan.n, plan.theta + plan.delta, plan.m));
  if (plan.replicates < 1) throw std::invalid_argument("simulation: replicates must be >= 1");
  if (plan.estimators.empty()) throw std::invalid_argument("simulation: no estimators requested");
  for (const auto& e : plan.estimators) validate(e);
}

EmpiricalDist::EmpiricalDist(std::vector<double> draws, std::size_t failures)
    : draws_(std::move(draws)), failures_(failures) {
  for (double x : draws_) {
    if (!std::isfinite(x)) throw std::invalid_argument("empirical distribution: draws must be finite");
  }
  std::sort(draws_.begin(), draws_.end());
  if (draws_.empty()) return;
  const double count = static_cast<double>(draws_.size());
  mean_ = compensated_sum(draws_) / count;
  std::vector<double> work(draws_.size());
  for (std::size_t i = 0; i < draws_.size(); ++i) work[i] = draws_[i] * draws_[i];
  mean_square_ = compensated_sum(work) / count;
  for (std::size_t i = 0; i < draws_.size(); ++i) work[i] = (draws_[i] - mean_) * (draws_[i] - mean_);
  variance_ = draws_.size() > 1 ? compensated_sum(work) / (count - 1.0) : 0.0;
}

double EmpiricalDist::quantile(double prob) const {
  if (draws_.empty()) throw std::logic_error("quantile of an empty distribution");
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::domain_error("quantile: probability must lie in [0,1]");
  const double pos = prob * static_cast<double>(draws_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, draws_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return draws_[lo] + frac * (draws_[hi] - draws_[lo]);
}

double EmpiricalDist::cdf(double x) const {
  if (draws_.empty()) throw std::logic_error("cdf of an empty distribution");
  const auto it = std::upper_bound(draws_.begin(), draws_.end(), x);
  return static_cast<double>(it - draws_.begin()) / static_cast<double>(draws_.size());
}

std::map<std::string, EmpiricalDist> simulate(const SimPlan& plan, unsigned workers) {
  validate(plan);
  std::vector<EstimatorConfig> configs;
  for (const auto& e : plan.estimators) configs.push_back(bind_conflict(e, plan.delta));
  const std::size_t k = configs.size();
  const std::size_t r = plan.replicates;
  const double rn = std::sqrt(static_cast<double>(plan.n));
  const double rm = std::sqrt(static_cast<double>(plan.m));

  std::vector<double> values(k * r, std::numeric_limits<double>::quiet_NaN());
  for_each_block(r, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    auto rng = block_stream(plan.seed, kSimulationStream, block);
    std::normal_distribution<double> normal;
    for (std::size_t i = begin; i < end; ++i) {
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      const TwoSampleSummary s{plan.theta + z1 / rn, plan.n, plan.theta + plan.delta + z2 / rm, plan.m};
      for (std::size_t j = 0; j < k; ++j) {
        try {
          const double t = estimate(configs[j], s).theta_est;
          if (std::isfinite(t)) values[j * r + i] = rn * (t - plan.theta);
        } catch (const std::exception&) {
          // recorded as a failure below
        }
      }
    }
  });

  std::map<std::string, EmpiricalDist> out;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> draws;
    draws.reserve(r);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < r; ++i) {
      const double v = values[j * r + i];
      if (std::isnan(v)) {
        ++failures;
      } else {
        draws.push_back(v);
      }
    }
    out.insert_or_assign(label(plan.estimators[j]), EmpiricalDist(std::move(draws), failures));
  }
  return out;
}

double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("ks_distance: empty sample");
  const auto& x = a.draws();
  const auto& y = b.draws();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double silverman_bandwidth(const EmpiricalDist& d) {
  if (d.size() < 2) throw std::invalid_argument("bandwidth: need at least two draws");
  const double sd = std::sqrt(d.variance());
  const double iqr = d.quantile(0.75) - d.quantile(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(d.size()), -0.2);
}

std::vector<double> kde_log_density(const EmpiricalDist& d, const std::vector<double>& grid, double bandwidth,
                                    unsigned workers) {
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(d);
  const auto& x = d.draws();
  const double log_norm = -std::log(static_cast<double>(x.size()) * h) - 0.5 * std::log(2.0 * M_PI);
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t g) {
    // log-sum-exp over the kernel terms
    double top = -std::numeric_limits<double>::infinity();
    for (double xi : x) top = std::max(top, -0.5 * ((grid[g] - xi) / h) * ((grid[g] - xi) / h));
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (grid[g] - x[i]) / h;
      terms[i] = std::exp(-0.5 * u * u - top);
    }
    out[g] = log_norm + top + std::log(compensated_sum(terms));
  });
  return out;
}

BootstrapResult bootstrap_ci(const BinomialRaw& current, const BinomialRaw& external, double sens,
                             std::size_t resamples, double level, std::uint64_t seed, BootstrapScheme scheme,
                             unsigned workers) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap: level must lie in (0,1)");
  if (resamples < 2) throw std::invalid_argument("bootstrap: need at least two resamples");
  if (!(sens >= 0.0)) throw std::invalid_argument("bootstrap: sensitivity must be >= 0");
  const auto observed = from_raw_binomial(current, external);
  const std::int64_t n = current.trials;
  const std::int64_t m = external.trials;
  const double rn = std::sqrt(static_cast<double>(n));
  const double rm = std::sqrt(static_cast<double>(m));

  std::vector<double> values(resamples);
  const std::size_t blocks = (resamples + kBlockSize - 1) / kBlockSize;
  std::vector<std::size_t> redrawn(blocks, 0);
  for_each_block(resamples, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    auto rng = block_stream(seed, kBootstrapStream, block);
    if (scheme == BootstrapScheme::Parametric) {
      std::normal_distribution<double> normal;
      for (std::size_t i = begin; i < end; ++i) {
        const double t = observed.current.value_st + normal(rng) / rn;
        const double b = observed.external.value_st + normal(rng) / rm;
        values[i] = est_ammse_s({t, n, b, m}, sens).theta_est * observed.current.sd;
      }
      return;
    }
    std::binomial_distribution<std::int64_t> draw_current(n, current.rate());
    std::binomial_distribution<std::int64_t> draw_external(m, external.rate());
    for (std::size_t i = begin; i < end; ++i) {
      while (true) {
        const BinomialRaw c{draw_current(rng), n};
        const BinomialRaw e{draw_external(rng), m};
        if (c.successes == 0 || c.successes == n || e.successes == 0 || e.successes == m) {
          ++redrawn[block];
          continue;
        }
        const auto cs = standardize_rate(c);
        const auto es = standardize_rate(e);
        values[i] = est_ammse_s({cs.value_st, n, es.value_st, m}, sens).theta_est * cs.sd;
        break;
      }
    }
  });

  std::sort(values.begin(), values.end());
  const EmpiricalDist dist(std::move(values));
  BootstrapResult out;
  out.lo = dist.quantile((1.0 - level) / 2.0);
  out.hi = dist.quantile((1.0 + level) / 2.0);
  out.median = dist.quantile(0.5);
  out.resamples = resamples;
  for (auto r : redrawn) out.redrawn += r;
  return out;
}

}  // namespace dib
