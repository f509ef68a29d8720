#include "dib/risk.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

#include "dib/rng.hpp"
#include "dib/sampling_law.hpp"
#include "dib/summaries.hpp"

namespace dib {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr QuadratureOptions kOuterTolerance{1e-9, 1e-8, 16};

void add_geometric(std::vector<double>& out, double center, double unit, double lo, double hi) {
  for (double k = unit; center - k > lo || center + k < hi; k *= 2.0) {
    if (center - k > lo) out.push_back(center - k);
    if (center + k < hi) out.push_back(center + k);
  }
  if (center > lo && center < hi) out.push_back(center);
}

double mse_gauss_hermite(const EstimatorConfig& config, double theta, double delta, std::int64_t n,
                         std::int64_t m, std::size_t nodes) {
  const auto bound = bind_conflict(config, delta);
  const auto& rule = gauss_hermite(nodes);
  const double sn = 1.0 / std::sqrt(static_cast<double>(n));
  const double sm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> terms;
  terms.reserve(nodes * nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const TwoSampleSummary s{theta + rule.nodes[i] * sn, n, theta + delta + rule.nodes[j] * sm, m};
      const double t = estimate(bound, s).theta_est;
      if (!std::isfinite(t)) {
        throw NumericalError("estimator " + label(config) + " is not finite at theta_hat=" +
                             format_double(s.theta_hat) + ", beta_hat=" + format_double(s.beta_hat));
      }
      terms.push_back(rule.weights[i] * rule.weights[j] * (t - theta) * (t - theta));
    }
  }
  return compensated_sum(terms);
}

template <class F>
IntegratedRisk integrate_prior(const ConflictPrior& prior, std::int64_t n, F&& f) {
  validate(prior);
  if (const auto* pm = std::get_if<prior::PointMass>(&prior)) {
    return {f(pm->delta), 0.0, 0.0, 1};
  }
  auto support = prior_support(prior);
  add_geometric(support.breakpoints, 0.0, 1.0 / std::sqrt(static_cast<double>(n)), support.lo, support.hi);
  std::sort(support.breakpoints.begin(), support.breakpoints.end());
  const auto r = integrate([&](double d) { return f(d) * prior_density(prior, d); }, support.lo,
                           support.hi, support.breakpoints, kOuterTolerance);
  return {r.value, r.error, support.tail_mass, r.evaluations};
}

}  // namespace

void validate(const ConflictPrior& p) {
  std::visit(overloaded{
                 [](const prior::Normal& d) {
                   if (!std::isfinite(d.mu) || !(d.var > 0.0 && std::isfinite(d.var))) {
                     throw std::invalid_argument("normal prior: need finite mean and positive variance");
                   }
                 },
                 [](const prior::Uniform& d) {
                   if (!(d.a < d.b) || !std::isfinite(d.a) || !std::isfinite(d.b)) {
                     throw std::invalid_argument("uniform prior: need finite a < b");
                   }
                 },
                 [](const prior::Laplace& d) {
                   if (!std::isfinite(d.loc) || !(d.scale > 0.0 && std::isfinite(d.scale))) {
                     throw std::invalid_argument("laplace prior: need finite location and positive scale");
                   }
                 },
                 [](const prior::LocationScaleT& d) {
                   if (d.v < 3) throw std::invalid_argument("t prior: v must be >= 3");
                   if (!std::isfinite(d.loc) || !(d.scale > 0.0 && std::isfinite(d.scale))) {
                     throw std::invalid_argument("t prior: need finite location and positive scale");
                   }
                 },
                 [](const prior::PointMass& d) {
                   if (!std::isfinite(d.delta)) throw std::invalid_argument("point mass: delta must be finite");
                 },
             },
             p);
}

double prior_density(const ConflictPrior& p, double x) {
  return std::visit(
      overloaded{
          [x](const prior::Normal& d) {
            const double sd = std::sqrt(d.var);
            return normal_pdf((x - d.mu) / sd) / sd;
          },
          [x](const prior::Uniform& d) { return x >= d.a && x <= d.b ? 1.0 / (d.b - d.a) : 0.0; },
          [x](const prior::Laplace& d) { return std::exp(-std::abs(x - d.loc) / d.scale) / (2.0 * d.scale); },
          [x](const prior::LocationScaleT& d) {
            const boost::math::students_t_distribution<double> t(d.v);
            return boost::math::pdf(t, (x - d.loc) / d.scale) / d.scale;
          },
          [](const prior::PointMass&) -> double {
            throw std::invalid_argument("point mass prior has no density");
          },
      },
      p);
}

std::string label(const ConflictPrior& p) {
  return std::visit(
      overloaded{
          [](const prior::Normal& d) { return "N(" + format_double(d.mu) + "," + format_double(d.var) + ")"; },
          [](const prior::Uniform& d) { return "U(" + format_double(d.a) + "," + format_double(d.b) + ")"; },
          [](const prior::Laplace& d) {
            return "Laplace(" + format_double(d.loc) + "," + format_double(d.scale) + ")";
          },
          [](const prior::LocationScaleT& d) {
            return "t" + std::to_string(d.v) + "(" + format_double(d.loc) + "," + format_double(d.scale) + ")";
          },
          [](const prior::PointMass& d) { return "point(" + format_double(d.delta) + ")"; },
      },
      p);
}

std::vector<ConflictPrior> table_priors(std::int64_t n_, std::int64_t m_) {
  const double n = static_cast<double>(n_);
  const double m = static_cast<double>(m_);
  return {prior::Normal{0.0, 1.0 / n}, prior::Normal{0.0, 3.0 / n + 3.0 / m}, prior::Uniform{-1.0, 1.0},
          prior::Laplace{0.0, std::pow(n + m, -0.35)}, prior::LocationScaleT{3, 0.0, 1.0 / std::sqrt(n)}};
}

PriorSupport prior_support(const ConflictPrior& p, double tail_mass) {
  if (!(tail_mass > 0.0 && tail_mass < 1.0)) throw std::invalid_argument("prior_support: tail mass in (0,1)");
  validate(p);
  PriorSupport out;
  auto symmetric = [&](double loc, double half, double unit, double mass) {
    out.lo = loc - half;
    out.hi = loc + half;
    out.tail_mass = mass;
    add_geometric(out.breakpoints, loc, unit, out.lo, out.hi);
  };
  std::visit(overloaded{
                 [&](const prior::Normal& d) {
                   const double sd = std::sqrt(d.var);
                   const double z = -normal_quantile(tail_mass / 2.0);
                   symmetric(d.mu, z * sd, sd, tail_mass);
                 },
                 [&](const prior::Uniform& d) {
                   out.lo = d.a;
                   out.hi = d.b;
                   out.tail_mass = 0.0;
                 },
                 [&](const prior::Laplace& d) {
                   symmetric(d.loc, d.scale * std::log(1.0 / tail_mass), d.scale, tail_mass);
                 },
                 [&](const prior::LocationScaleT& d) {
                   const boost::math::students_t_distribution<double> t(d.v);
                   const double z = boost::math::quantile(boost::math::complement(t, tail_mass / 2.0));
                   symmetric(d.loc, z * d.scale, d.scale, tail_mass);
                 },
                 [&](const prior::PointMass& d) {
                   out.lo = d.delta;
                   out.hi = d.delta;
                   out.tail_mass = 0.0;
                 },
             },
             p);
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  return out;
}

double mse_numeric(const EstimatorConfig& config, double theta, double delta, std::int64_t n,
                   std::int64_t m, const MseOptions& opts) {
  if (!std::isfinite(theta) || !std::isfinite(delta)) {
    throw std::invalid_argument("mse_numeric: theta and delta must be finite");
  }
  if (opts.method == MseMethod::GaussHermite) {
    if (opts.nodes < 2) throw std::invalid_argument("mse_numeric: need at least two nodes");
    return mse_gauss_hermite(config, theta, delta, n, m, opts.nodes);
  }
  return SamplingLaw(config, n, m).mse(delta);
}

double srmse(const EstimatorConfig& config, double theta, double delta, std::int64_t n, std::int64_t m,
             const MseOptions& opts) {
  return std::sqrt(static_cast<double>(n) * mse_numeric(config, theta, delta, n, m, opts));
}

RiskCurve srmse_curve(const EstimatorConfig& config, std::int64_t n, std::int64_t m,
                      const std::vector<double>& delta_grid, unsigned workers) {
  RiskCurve out;
  out.estimator = label(config);
  out.method = "gauss-kronrod over delta_hat, pooled direction exact";
  out.sqrt_n_delta.resize(delta_grid.size());
  out.srmse.resize(delta_grid.size());
  const SamplingLaw law(config, n, m);
  const double rn = std::sqrt(static_cast<double>(n));
  parallel_for(delta_grid.size(), workers, [&](std::size_t i) {
    out.sqrt_n_delta[i] = rn * delta_grid[i];
    out.srmse[i] = std::sqrt(static_cast<double>(n) * law.mse(delta_grid[i]));
  });
  return out;
}

IntegratedRisk integrated_srmse(const EstimatorConfig& config, const ConflictPrior& prior,
                                std::int64_t n, std::int64_t m) {
  const SamplingLaw law(config, n, m);
  const double nn = static_cast<double>(n);
  return integrate_prior(prior, n, [&](double d) { return std::sqrt(nn * law.mse(d)); });
}

IntegratedRisk imse(const EstimatorConfig& config, double theta, const ConflictPrior& prior,
                    std::int64_t n, std::int64_t m) {
  if (!std::isfinite(theta)) throw std::invalid_argument("imse: theta must be finite");
  const SamplingLaw law(config, n, m);
  return integrate_prior(prior, n, [&](double d) { return law.mse(d); });
}

std::vector<RiskTableCell> risk_table(const std::vector<EstimatorConfig>& estimators,
                                      const std::vector<ConflictPrior>& priors, std::int64_t n,
                                      std::int64_t m, unsigned workers) {
  std::vector<RiskTableCell> cells(estimators.size() * priors.size());
  parallel_for(cells.size(), workers, [&](std::size_t k) {
    const auto& e = estimators[k / priors.size()];
    const auto& p = priors[k % priors.size()];
    cells[k] = {label(e), label(p), integrated_srmse(e, p, n, m).value};
  });
  return cells;
}

}  // namespace dib
