#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dib/estimators.hpp"

namespace dib {

/// Local regime delta = h / sqrt(n), theta = h_theta / sqrt(n), n / (n+m) -> p.
struct LocalScenario {
  double h = 0.0;
  double p = 0.5;
  double h_theta = 0.0;
};

void validate(const LocalScenario& sc);

/// One draw of sqrt(n)(T - theta) under the limit law, with the Gaussian pair
/// that produced it.
struct LimitDraw {
  double value = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double xi = 0.0;
};

/// sqrt(1-p)(h - zeta1) + sqrt(p) zeta2
double limit_xi(const LocalScenario& sc, double zeta1, double zeta2);

/// p zeta1 + sqrt(p(1-p)) zeta2 + (1-p) h, the pooled limit.
double limit_pooled(const LocalScenario& sc, double zeta1, double zeta2);

/// sqrt(p/(1-p)) zeta2 + h, the limit of sqrt(n)(beta_hat - theta).
double limit_external_mle(const LocalScenario& sc, double zeta2);

/// Limit value for a given Gaussian pair. Supported: MLE, Pooled, TTPool,
/// OMMSE, AMMSE, AMMSE_S, GDIB (GDIB with tau follows the pooled law),
/// HDPP, EBPP and the fixed power prior. OMMSE uses the scenario's h as its
/// local conflict. Throws std::invalid_argument("no closed limit law
/// implemented") for ALASSO, NP, LSTP and LTR.
LimitDraw limit_value(const EstimatorConfig& config, const LocalScenario& sc, double zeta1,
                      double zeta2);

LimitDraw limit_draw(const EstimatorConfig& config, const LocalScenario& sc, std::mt19937_64& rng);

/// `count` limit values from block substreams of `seed`.
std::vector<double> limit_draws(const EstimatorConfig& config, const LocalScenario& sc,
                                std::size_t count, std::uint64_t seed, unsigned workers = 1);

struct NormalLaw {
  double mean = 0.0;
  double variance = 1.0;
};

/// N((1-p) h, p): the common limit of ALASSO, GDIB(g, n^(-2 tau)) and Pooled.
NormalLaw limit_law_theorem4(const LocalScenario& sc);

/// True when the estimator's limit is the pooled law.
bool follows_theorem4(const EstimatorConfig& config);

struct LimitRisk {
  double srmse = 0.0;
  double std_error = 0.0;  // zero when exact
  bool exact = false;
};

/// sqrt(E[value^2]) under the limit law. Exact for MLE and pooled-law
/// estimators, Monte Carlo with a delta-method standard error otherwise.
LimitRisk limit_srmse(const EstimatorConfig& config, const LocalScenario& sc, std::size_t draws,
                      std::uint64_t seed, unsigned workers = 1);

}  // namespace dib
