#include "dib/risk.hpp"
#include "dib/sampling_law.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace dib {
namespace {

// MSE of theta_hat + w delta_hat for a constant weight w.
double fixed_weight_mse(double w, double delta, double n, double m) {
  return (1 - w) * (1 - w) / n + w * w / m + w * w * delta * delta;
}

TEST(Mse, MleIsOneOverN) {
  for (double d : {0.0, 0.01, 1.0}) {
    EXPECT_NEAR(mse_numeric(est::Mle{}, 0.0, d, 1000, 100000), 1e-3, 1e-13);
    EXPECT_NEAR(mse_numeric(est::Mle{}, 0.0, d, 1000, 100000, {MseMethod::GaussHermite, 64}), 1e-3, 1e-13);
  }
}

TEST(Mse, ConstantWeightsClosedForm) {
  const double n = 100, m = 400;
  for (double d : {0.0, 0.03, 0.2, 2.0}) {
    const double ommse_w = m / (n + m + n * m * d * d);
    EXPECT_NEAR(mse_numeric(est::Ommse{d}, 0.0, d, 100, 400) / fixed_weight_mse(ommse_w, d, n, m), 1.0, 1e-10);
    EXPECT_NEAR(mse_numeric(est::Pooled{}, 0.0, d, 100, 400), 1 / (n + m) + 0.64 * d * d, 1e-12);
    EXPECT_NEAR(mse_numeric(est::NormalPrior{}, 0.0, d, 100, 400) /
                    fixed_weight_mse(m / (n + 2 * m), d, n, m), 1.0, 1e-10);
    const double g = 0.3;
    EXPECT_NEAR(mse_numeric(est::PowerPriorFixed{g}, 0.0, d, 100, 400) /
                    fixed_weight_mse(g * m / (n + g * m), d, n, m), 1.0, 1e-10);
  }
}

TEST(Mse, IndependentOfTheta) {
  for (const auto& c : standard_estimators()) {
    EXPECT_NEAR(mse_numeric(c, 0.0, 0.05, 200, 5000) / mse_numeric(c, 3.7, 0.05, 200, 5000), 1.0, 1e-9)
        << label(c);
  }
}

TEST(Mse, GaussHermiteAgreesForSmoothRules) {
  for (const EstimatorConfig& c : {EstimatorConfig{est::Ammse{}}, EstimatorConfig{est::Hdpp{}}}) {
    for (double h : {0.0, 1.0, 4.0}) {
      const double d = h / std::sqrt(100.0);
      const double a = mse_numeric(c, 0.0, d, 100, 1000);
      const double g128 = mse_numeric(c, 0.0, d, 100, 1000, {MseMethod::GaussHermite, 128});
      const double g256 = mse_numeric(c, 0.0, d, 100, 1000, {MseMethod::GaussHermite, 256});
      EXPECT_NEAR(g128 / a, 1.0, 1e-5) << label(c) << " h=" << h;
      // doubling the nodes moves the result closer to the adaptive value
      EXPECT_LE(std::abs(g256 - a), std::abs(g128 - a) + 1e-15);
    }
  }
}

TEST(Mse, GaussHermiteTensorNoiseOnJumps) {
  // GH has no panel splitting, so a test-then-pool jump is only resolved coarsely
  const double d = std::sqrt(3.84) * conflict_sd(100, 1000);
  const double a = mse_numeric(est::TtPool{}, 0.0, d, 100, 1000);
  const double g = mse_numeric(est::TtPool{}, 0.0, d, 100, 1000, {MseMethod::GaussHermite, 256});
  EXPECT_NEAR(g / a, 1.0, 0.05);
}

TEST(Srmse, OmmseDominatesConstantWeights) {
  for (double h = 0.0; h <= 8.0; h += 0.25) {
    const double d = h / std::sqrt(1000.0);
    const double best = srmse(est::Ommse{d}, 0.0, d, 1000, 100000);
    for (const EstimatorConfig& c : {EstimatorConfig{est::Mle{}}, EstimatorConfig{est::Pooled{}},
                                     EstimatorConfig{est::NormalPrior{}}, EstimatorConfig{est::PowerPriorFixed{0.1}}}) {
      EXPECT_LE(best, srmse(c, 0.0, d, 1000, 100000) * (1 + 1e-9)) << label(c) << " h=" << h;
    }
  }
}

TEST(Srmse, NormalPriorMonotone) {
  double prev = 0.0;
  for (double h = 0.0; h <= 10.0; h += 0.5) {
    const double cur = srmse(est::NormalPrior{}, 0.0, h / std::sqrt(1000.0), 1000, 100000);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
}

TEST(Srmse, ReturnsToMleForLargeConflict) {
  for (const EstimatorConfig& c : {EstimatorConfig{est::Ammse{}}, EstimatorConfig{est::Ebpp{}},
                                   EstimatorConfig{est::Hdpp{}}, EstimatorConfig{est::TtPool{}}}) {
    EXPECT_NEAR(srmse(c, 0.0, 20.0 / std::sqrt(1000.0), 1000, 100000), 1.0, 0.03) << label(c);
  }
}

TEST(Curve, PooledClosedFormAndWorkers) {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.2 * i / std::sqrt(1000.0));
  const auto a = srmse_curve(est::Pooled{}, 1000, 100000, grid, 1);
  const auto b = srmse_curve(est::Pooled{}, 1000, 100000, grid, 3);
  EXPECT_EQ(a.srmse, b.srmse);
  const double q = 100000.0 / 101000.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = 0.2 * i;
    EXPECT_NEAR(a.sqrt_n_delta[i], h, 1e-12);
    EXPECT_NEAR(a.srmse[i], std::sqrt(1000.0 / 101000.0 + q * q * h * h), 1e-9);
  }
}

TEST(Prior, DensitiesIntegrateOverSupport) {
  for (const auto& p : table_priors(1000, 100000)) {
    const auto sup = prior_support(p);
    EXPECT_LE(sup.tail_mass, 1e-10 * 1.0001) << label(p);
    const double mass = integrate([&](double x) { return prior_density(p, x); }, sup.lo, sup.hi,
                                  sup.breakpoints, {1e-14, 1e-12, 18}).value;
    EXPECT_NEAR(mass, 1.0 - sup.tail_mass, 1e-9) << label(p);
  }
}

TEST(Prior, Validation) {
  EXPECT_THROW(validate(ConflictPrior{prior::Normal{0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(validate(ConflictPrior{prior::Uniform{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(ConflictPrior{prior::LocationScaleT{0, 0.0, 1.0}}), std::invalid_argument);
  EXPECT_EQ(table_priors(10, 20).size(), 5u);
}

TEST(Integrated, PooledAgainstTrapezoidOracle) {
  const double n = 1000, m = 100000, q = m / (n + m);
  for (double var : {1.0 / n, 3.0 / n + 3.0 / m}) {
    const double sd = std::sqrt(var);
    const int steps = 400000;
    const double lo = -12 * sd, h = 24 * sd / steps;
    double oracle = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double x = lo + h * i;
      const double f = std::sqrt(n / (n + m) + n * q * q * x * x) * std::exp(-0.5 * x * x / var) /
                       std::sqrt(2 * M_PI * var);
      oracle += (i == 0 || i == steps ? 0.5 : 1.0) * f * h;
    }
    const auto r = integrated_srmse(est::Pooled{}, prior::Normal{0.0, var}, 1000, 100000);
    EXPECT_NEAR(r.value, oracle, 1e-7);
    EXPECT_GT(r.evaluations, 0u);
  }
}

TEST(Integrated, PointMassIsPointwise) {
  const auto r = imse(est::Ammse{}, 0.0, prior::PointMass{0.05}, 100, 1000);
  EXPECT_NEAR(r.value, mse_numeric(est::Ammse{}, 0.0, 0.05, 100, 1000), 1e-15);
  EXPECT_EQ(r.tail_mass, 0.0);
}

TEST(Integrated, NormalPriorIsBayesUnderMatchingPrior) {
  // NP's weight m/(n+2m) is the posterior-mean weight when delta ~ N(0, 1/n)
  const ConflictPrior pi{prior::Normal{0.0, 1.0 / 1000.0}};
  const double np = imse(est::NormalPrior{}, 0.0, pi, 1000, 100000).value;
  for (const auto& c : standard_estimators()) {
    EXPECT_GE(imse(c, 0.0, pi, 1000, 100000).value, np * (1 - 1e-9)) << label(c);
  }
  EXPECT_NEAR(np, fixed_weight_mse(100000.0 / 201000.0, 0.0, 1000, 100000) +
                      std::pow(100000.0 / 201000.0, 2) / 1000.0, 1e-8 * np);
}

TEST(Table, EstimatorMajorOrder) {
  const std::vector<EstimatorConfig> es = {est::Mle{}, est::Pooled{}};
  const auto priors = table_priors(1000, 100000);
  const auto cells = risk_table(es, priors, 1000, 100000, 2);
  ASSERT_EQ(cells.size(), 10u);
  EXPECT_EQ(cells[0].estimator, "mle");
  EXPECT_EQ(cells[5].estimator, "pooled");
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(cells[i].value, 1.0, 1e-9);
}

TEST(SamplingLaw, CdfQuantileInverse) {
  for (const EstimatorConfig& c : {EstimatorConfig{est::Ammse{}}, EstimatorConfig{est::TtPool{}},
                                   EstimatorConfig{est::Lstp{}}}) {
    const SamplingLaw law(c, 1000, 100000);
    for (double prob : {0.025, 0.5, 0.975, 1 - 1e-6}) {
      const double t = law.quantile(prob, 0.05);
      EXPECT_NEAR(law.cdf(t, 0.05), prob, 1e-9) << label(c);
      EXPECT_NEAR(law.sf(t, 0.05), 1 - prob, 1e-9) << label(c);
    }
  }
}

TEST(SamplingLaw, MleQuantileIsNormal) {
  const SamplingLaw law(est::Mle{}, 400, 900);
  EXPECT_NEAR(law.quantile(0.975, 0.3), 1.959963984540054 / 20.0, 1e-12);
}

}  // namespace
}  // namespace dib
