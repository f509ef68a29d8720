#include "dib/testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dib/numerics.hpp"
#include "dib/rng.hpp"
#include "dib/sampling_law.hpp"

namespace dib {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::uint64_t kPValueStream = 0x5056414cULL;
constexpr double kGrowthTolerance = 1e-7;
constexpr int kMaxDoublings = 12;

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<double> default_grid(const TestSpec& spec) {
  return std::visit(overloaded{
                        [&](const convention::DeltaBounded& c) {
                          return spec.signed_conflict ? linspace(-c.delta0, c.delta0, 401)
                                                      : linspace(0.0, c.delta0, 201);
                        },
                        [&](const convention::AllDelta&) {
                          const double top = 30.0 / std::sqrt(static_cast<double>(spec.n));
                          return spec.signed_conflict ? linspace(-top, top, 601) : linspace(0.0, top, 301);
                        },
                        [](const convention::DeltaZero&) { return std::vector<double>{0.0}; },
                    },
                    spec.convention);
}

PValue dib_pvalue_mc(const TwoSampleSummary& s, double theta0, double delta0, const EstimatorConfig& config,
                     double statistic, std::size_t draws, std::uint64_t seed, unsigned workers) {
  const double rn = std::sqrt(static_cast<double>(s.n));
  const double rm = std::sqrt(static_cast<double>(s.m));
  const std::size_t blocks = (draws + kBlockSize - 1) / kBlockSize;
  std::vector<std::size_t> hits(blocks, 0);
  for_each_block(draws, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    auto rng = block_stream(seed, kPValueStream, block);
    std::normal_distribution<double> normal;
    std::size_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      const TwoSampleSummary sim{theta0 + z1 / rn, s.n, theta0 + delta0 + z2 / rm, s.m};
      if (rn * (estimate(config, sim).theta_est - theta0) > statistic) ++count;
    }
    hits[block] = count;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(draws);
  return {statistic, p, std::sqrt(p * (1.0 - p) / static_cast<double>(draws))};
}

}  // namespace

std::string label(const Convention& c) {
  return std::visit(overloaded{
                        [](const convention::AllDelta&) -> std::string { return "all_delta"; },
                        [](const convention::DeltaZero&) -> std::string { return "delta_zero"; },
                        [](const convention::DeltaBounded& b) -> std::string {
                          return "delta_bounded(" + format_double(b.delta0) + ")";
                        },
                    },
                    c);
}

void validate(const TestSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw std::invalid_argument("test: alpha must lie in (0,1)");
  if (!std::isfinite(spec.theta0)) throw std::invalid_argument("test: theta0 must be finite");
  if (const auto* b = std::get_if<convention::DeltaBounded>(&spec.convention)) {
    if (!(b->delta0 > 0.0) || !std::isfinite(b->delta0)) {
      throw std::invalid_argument("test: delta0 must be positive");
    }
  }
  validate(spec.estimator);
  validate(make_summary(0.0, spec.n, 0.0, spec.m));
}

double null_quantile(const TestSpec& spec, double delta) {
  validate(spec);
  const SamplingLaw law(spec.estimator, spec.n, spec.m);
  return std::sqrt(static_cast<double>(spec.n)) * law.quantile(1.0 - spec.alpha, delta);
}

CriticalValue critical_value(const TestSpec& spec, const std::vector<double>& delta_grid) {
  validate(spec);
  const SamplingLaw law(spec.estimator, spec.n, spec.m);
  const double rn = std::sqrt(static_cast<double>(spec.n));
  auto q = [&](double d) { return rn * law.quantile(1.0 - spec.alpha, d); };

  if (std::holds_alternative<convention::DeltaZero>(spec.convention)) {
    return {q(0.0), 0.0, false, false};
  }
  auto grid = delta_grid.empty() ? default_grid(spec) : delta_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (const auto* b = std::get_if<convention::DeltaBounded>(&spec.convention)) {
    const double lo = spec.signed_conflict ? -b->delta0 : 0.0;
    grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double d) { return d < lo || d > b->delta0; }),
               grid.end());
    if (grid.empty()) throw std::invalid_argument("critical_value: grid has no point inside [0, delta0]");
  }

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = q(grid[i]);
  const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());

  CriticalValue out;
  out.z = values[best];
  out.delta_at_sup = grid[best];
  if (grid.size() >= 2) {
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[std::min(best + 1, grid.size() - 1)];
    const double width = b - a;
    const double d = minimize_scanned([&](double x) { return -q(x); }, a, b, 5, 1e-9 * std::max(width, 1e-12));
    const double v = q(d);
    if (v > out.z) {
      out.z = v;
      out.delta_at_sup = d;
    }
  }

  if (std::holds_alternative<convention::AllDelta>(spec.convention) && best + 1 == grid.size()) {
    // The sup sits on the edge: keep doubling the range while the quantile
    // still grows.
    double edge = grid.back();
    double previous = values.back();
    bool growing = true;
    for (int k = 0; k < kMaxDoublings && growing; ++k) {
      edge *= 2.0;
      const double v = q(edge);
      growing = v > previous + kGrowthTolerance * std::max(1.0, std::abs(previous));
      if (v > out.z) {
        out.z = v;
        out.delta_at_sup = edge;
      }
      previous = v;
    }
    if (growing) {
      out.z = std::numeric_limits<double>::infinity();
      out.unbounded = true;
      out.delta_at_sup = std::numeric_limits<double>::infinity();
    } else {
      out.boundary_warning = true;
    }
  }
  return out;
}

double power(const TestSpec& spec, double critical, double theta, double delta) {
  validate(spec);
  if (std::isnan(critical)) throw std::invalid_argument("power: critical value is NaN");
  if (critical == std::numeric_limits<double>::infinity()) return 0.0;
  const SamplingLaw law(spec.estimator, spec.n, spec.m);
  const double t = spec.theta0 - theta + critical / std::sqrt(static_cast<double>(spec.n));
  return law.sf(t, delta);
}

PowerCurve power_curve(const TestSpec& spec, const CriticalValue& critical, double theta,
                       const std::vector<double>& delta_grid, unsigned workers) {
  validate(spec);
  PowerCurve out;
  out.estimator = label(spec.estimator);
  out.convention = label(spec.convention);
  out.critical = critical.z;
  out.theta = theta;
  out.delta = delta_grid;
  out.rejection.resize(delta_grid.size());
  parallel_for(delta_grid.size(), workers,
               [&](std::size_t i) { out.rejection[i] = power(spec, critical.z, theta, delta_grid[i]); });
  return out;
}

SweetSpot sweet_spot(const TestSpec& spec, double theta, std::size_t grid_points, double min_gain) {
  validate(spec);
  const auto* bounded = std::get_if<convention::DeltaBounded>(&spec.convention);
  if (!bounded) throw std::invalid_argument("sweet_spot: needs the DeltaBounded convention");
  if (grid_points < 2) throw std::invalid_argument("sweet_spot: need at least two grid points");
  const double delta0 = bounded->delta0;

  const auto crit = critical_value(spec);
  if (crit.unbounded) throw NumericalError("sweet_spot: critical value is unbounded");
  TestSpec mle_spec = spec;
  mle_spec.estimator = est::Mle{};
  const double mle_power = power(mle_spec, critical_value(mle_spec).z, theta, 0.0);

  auto gain = [&](double d) { return power(spec, crit.z, theta, d) - mle_power - min_gain; };
  const auto grid = linspace(0.0, delta0, grid_points);
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = gain(grid[i]);

  SweetSpot out;
  out.candidate_lo = std::max(0.0, delta0 - theta);
  out.candidate_hi = delta0;
  const auto top = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
  out.max_gain = g[top] + min_gain;
  out.delta_at_max_gain = grid[top];

  std::size_t best_begin = 0, best_len = 0;
  for (std::size_t i = 0; i < g.size();) {
    if (g[i] <= 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < g.size() && g[j] > 0.0) ++j;
    if (j - i > best_len) {
      best_begin = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len == 0) return out;
  const std::size_t first = best_begin;
  const std::size_t last = best_begin + best_len - 1;
  out.lo = first == 0 ? grid[0] : find_root(gain, grid[first - 1], grid[first], 1e-12);
  out.hi = last + 1 == grid.size() ? grid.back() : find_root(gain, grid[last], grid[last + 1], 1e-12);
  return out;
}

P2P3 p2_p3(const TwoSampleSummary& s, double delta0, double theta0) {
  validate(s);
  if (!(delta0 > 0.0)) throw std::invalid_argument("p2_p3: delta0 must be positive");
  const double n = static_cast<double>(s.n);
  const double sd_theta = 1.0 / std::sqrt(n);
  const double sd_cond = 1.0 / std::sqrt(static_cast<double>(s.m));
  const double d_obs = s.delta_hat();
  P2P3 out;
  out.p3 = normal_cdf((delta0 - d_obs) / conflict_sd(s.n, s.m));
  // Given theta*, delta* ~ N(d_obs - (theta* - theta_hat), 1/m).
  auto integrand = [&](double t) {
    const double excess = t - theta0;
    if (excess <= 0.0) return 0.0;
    const double mean = d_obs - (t - s.theta_hat);
    const double upper = normal_cdf((delta0 - mean) / sd_cond);
    const double lower = normal_cdf((delta0 - excess - mean) / sd_cond);
    return (upper - lower) * normal_pdf((t - s.theta_hat) / sd_theta) / sd_theta;
  };
  const double lo = std::max(theta0, s.theta_hat - 12.0 * sd_theta);
  const double hi = s.theta_hat + 12.0 * sd_theta;
  if (lo < hi) {
    out.p2 = std::clamp(integrate(integrand, lo, hi, {}, {1e-13, 1e-10, 18}).value, 0.0, out.p3);
  }
  return out;
}

PValue pvalue(PValueOption option, const TwoSampleSummary& s, double theta0, double delta0, double sens,
              std::size_t mc_draws, std::uint64_t seed, unsigned workers) {
  validate(s);
  const double rn = std::sqrt(static_cast<double>(s.n));
  switch (option) {
    case PValueOption::MleAllDelta: {
      const double z = rn * (s.theta_hat - theta0);
      return {z, normal_ccdf(z), 0.0};
    }
    case PValueOption::PooledDeltaZero: {
      const double z = rn * (s.pooled() - theta0);
      return {z, normal_ccdf(z / std::sqrt(s.p_finite())), 0.0};
    }
    case PValueOption::DibDeltaBounded: {
      const EstimatorConfig config = est::AmmseS{sens};
      validate(config);
      if (!std::isfinite(delta0)) throw std::invalid_argument("pvalue: delta0 must be finite");
      const double z = rn * (estimate(config, s).theta_est - theta0);
      if (mc_draws > 0) return dib_pvalue_mc(s, theta0, delta0, config, z, mc_draws, seed, workers);
      const SamplingLaw law(config, s.n, s.m);
      return {z, law.sf(z / rn, delta0), 0.0};
    }
  }
  throw std::invalid_argument("pvalue: unknown option");
}

double tipping_point(const TwoSampleSummary& s, double theta0, double sens, double target_p,
                     double max_delta0) {
  if (!(target_p > 0.0 && target_p < 1.0)) throw std::invalid_argument("tipping_point: target in (0,1)");
  if (!(max_delta0 > 0.0)) throw std::invalid_argument("tipping_point: max_delta0 must be positive");
  validate(s);
  const EstimatorConfig config = est::AmmseS{sens};
  const SamplingLaw law(config, s.n, s.m);
  const double rn = std::sqrt(static_cast<double>(s.n));
  const double z = rn * (estimate(config, s).theta_est - theta0);
  auto excess = [&](double d) { return law.sf(z / rn, d) - target_p; };

  const double step = conflict_sd(s.n, s.m) / 100.0;
  const auto count = static_cast<std::size_t>(std::ceil(max_delta0 / step));
  double prev_d = 0.0;
  double prev = excess(0.0);
  if (prev == 0.0) return 0.0;
  for (std::size_t i = 1; i <= count; ++i) {
    const double d = std::min(max_delta0, step * static_cast<double>(i));
    const double cur = excess(d);
    if ((prev < 0.0) != (cur < 0.0)) return find_root(excess, prev_d, d, 1e-12);
    prev_d = d;
    prev = cur;
  }
  throw NumericalError("tipping_point: p-value does not reach " + format_double(target_p) +
                       " for delta0 in (0, " + format_double(max_delta0) + "]");
}

std::vector<PowerDecayRow> local_power_decay(const EstimatorConfig& config, double h_theta, double h,
                                             const std::vector<std::int64_t>& n_ladder, double alpha,
                                             unsigned workers) {
  std::vector<PowerDecayRow> rows(n_ladder.size());
  parallel_for(n_ladder.size(), workers, [&](std::size_t i) {
    TestSpec spec;
    spec.alpha = alpha;
    spec.convention = convention::AllDelta{};
    spec.estimator = config;
    spec.n = n_ladder[i];
    spec.m = 100 * n_ladder[i];
    const double rn = std::sqrt(static_cast<double>(spec.n));
    const auto crit = critical_value(spec);
    rows[i] = {spec.n, spec.m, crit.z, power(spec, crit.z, h_theta / rn, h / rn)};
  });
  return rows;
}

std::vector<PowerDecayRow> alasso_local_power_decay(double tau, double h_theta, double h,
                                                    const std::vector<std::int64_t>& n_ladder, double alpha,
                                                    unsigned workers) {
  return local_power_decay(est::Alasso{tau}, h_theta, h, n_ladder, alpha, workers);
}

}  // namespace dib
