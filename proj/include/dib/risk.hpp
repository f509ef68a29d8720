#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dib/estimators.hpp"
#include "dib/numerics.hpp"

namespace dib {

namespace prior {
struct Normal {
  double mu = 0.0;
  double var = 1.0;
};
struct Uniform {
  double a = -1.0;
  double b = 1.0;
};
struct Laplace {
  double loc = 0.0;
  double scale = 1.0;
};
struct LocationScaleT {
  int v = 3;
  double loc = 0.0;
  double scale = 1.0;
};
struct PointMass {
  double delta = 0.0;
};
}  // namespace prior

using ConflictPrior =
    std::variant<prior::Normal, prior::Uniform, prior::Laplace, prior::LocationScaleT, prior::PointMass>;

void validate(const ConflictPrior& p);
double prior_density(const ConflictPrior& p, double delta);
std::string label(const ConflictPrior& p);

/// The five priors of the risk table for sample sizes (n, m), in order:
/// N(0, 1/n), N(0, 3/n + 3/m), U(-1, 1), Laplace(0, (n+m)^-0.35),
/// t_3(0, 1/sqrt(n)).
std::vector<ConflictPrior> table_priors(std::int64_t n, std::int64_t m);

/// Integration range and panel splits for a prior: the central interval
/// holding all but `tail_mass` of the distribution, split at the location
/// and at geometrically spaced offsets from it.
struct PriorSupport {
  double lo = 0.0;
  double hi = 0.0;
  double tail_mass = 0.0;  // mass outside [lo, hi]
  std::vector<double> breakpoints;
};

PriorSupport prior_support(const ConflictPrior& p, double tail_mass = 1e-10);

enum class MseMethod { Adaptive, GaussHermite };

struct MseOptions {
  MseMethod method = MseMethod::Adaptive;
  std::size_t nodes = 128;  // per axis, GaussHermite only
};

/// E[(T - theta)^2] under theta_hat ~ N(theta, 1/n), beta_hat ~ N(theta + delta, 1/m).
/// Adaptive: one-dimensional Gauss-Kronrod over delta_hat with the pooled
/// direction integrated analytically. GaussHermite: tensor rule over
/// (theta_hat, beta_hat) with `nodes` per axis, evaluating the estimator at
/// each node pair.
double mse_numeric(const EstimatorConfig& config, double theta, double delta, std::int64_t n,
                   std::int64_t m, const MseOptions& opts = {});

/// sqrt(n * mse_numeric)
double srmse(const EstimatorConfig& config, double theta, double delta, std::int64_t n, std::int64_t m,
             const MseOptions& opts = {});

struct RiskCurve {
  std::string estimator;
  std::vector<double> sqrt_n_delta;
  std::vector<double> srmse;
  std::string method;  // integration metadata
};

RiskCurve srmse_curve(const EstimatorConfig& config, std::int64_t n, std::int64_t m,
                      const std::vector<double>& delta_grid, unsigned workers = 1);

struct IntegratedRisk {
  double value = 0.0;
  double error = 0.0;
  double tail_mass = 0.0;
  std::size_t evaluations = 0;
};

/// Integral of SRMSE(delta) against the prior.
IntegratedRisk integrated_srmse(const EstimatorConfig& config, const ConflictPrior& prior,
                                std::int64_t n, std::int64_t m);

/// Integral of MSE(delta) against the prior.
IntegratedRisk imse(const EstimatorConfig& config, double theta, const ConflictPrior& prior,
                    std::int64_t n, std::int64_t m);

struct RiskTableCell {
  std::string estimator;
  std::string prior;
  double value = 0.0;
};

/// integrated_srmse for every (estimator, prior) pair, estimator-major.
std::vector<RiskTableCell> risk_table(const std::vector<EstimatorConfig>& estimators,
                                      const std::vector<ConflictPrior>& priors, std::int64_t n,
                                      std::int64_t m, unsigned workers = 1);

}  // namespace dib
