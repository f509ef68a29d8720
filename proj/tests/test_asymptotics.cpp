#include "dib/asymptotics.hpp"
#include "dib/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace dib {
namespace {

// sqrt(n)(T - theta) at a very large n with the sampling noise fixed to
// (zeta1, zeta2); should agree with the limit value for continuous maps.
double finite_scaled(const EstimatorConfig& c, const LocalScenario& sc, double z1, double z2) {
  const double n = 1e10;
  const double m = n * (1.0 - sc.p) / sc.p;
  const double theta = 0.0;
  const TwoSampleSummary s{theta + z1 / std::sqrt(n), static_cast<std::int64_t>(n),
                           theta + sc.h / std::sqrt(n) + z2 / std::sqrt(m), static_cast<std::int64_t>(m)};
  const auto bound = bind_conflict(c, sc.h / std::sqrt(n));
  return std::sqrt(n) * (estimate(bound, s).theta_est - theta);
}

TEST(Limit, XiAndPooledUncorrelated) {
  const LocalScenario sc{1.3, 0.3, 0.0};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  double sx = 0, sp = 0, sxp = 0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double a = z(rng), b = z(rng);
    const double x = limit_xi(sc, a, b), pp = limit_pooled(sc, a, b);
    sx += x;
    sp += pp;
    sxp += x * pp;
  }
  const double cov = sxp / count - (sx / count) * (sp / count);
  EXPECT_NEAR(cov, 0.0, 5.0 / std::sqrt(count));
  // exact coefficients: cov = -p sqrt(1-p) + sqrt(p) sqrt(p(1-p)) = 0
  EXPECT_NEAR(limit_xi(sc, 1.0, 0.0) - limit_xi(sc, 0.0, 0.0), -std::sqrt(0.7), 1e-15);
}

TEST(Limit, MatchesLargeSampleEstimators) {
  const std::vector<EstimatorConfig> configs = {est::Mle{},     est::Pooled{},  est::Ammse{},
                                                est::AmmseS{0.4}, est::Ebpp{},  est::Hdpp{},
                                                est::Ommse{},   est::TtPool{},  est::Gdib{mixing::ebpp(), 0.5},
                                                est::PowerPriorFixed{0.3}};
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (double h : {0.0, 0.7, 3.0}) {
    for (double p : {0.01, 0.2, 0.5}) {
      const LocalScenario sc{h, p, 0.0};
      for (int i = 0; i < 40; ++i) {
        const double a = z(rng), b = z(rng);
        const double xi = limit_xi(sc, a, b);
        if (std::abs(xi * xi - 3.84) < 0.05) continue;  // test-then-pool threshold
        for (const auto& c : configs) {
          EXPECT_NEAR(limit_value(c, sc, a, b).value, finite_scaled(c, sc, a, b), 2e-4)
              << label(c) << " h=" << h << " p=" << p;
        }
      }
    }
  }
}

TEST(Limit, MleAndExternal) {
  const LocalScenario sc{2.0, 0.25, 0.0};
  EXPECT_EQ(limit_value(est::Mle{}, sc, 0.3, -1.0).value, 0.3);
  EXPECT_NEAR(limit_external_mle(sc, 1.0), 2.0 + std::sqrt(1.0 / 3.0), 1e-15);
}

TEST(Limit, TtPoolAcceptanceRate) {
  const LocalScenario sc{0.0, 0.2, 0.0};
  std::mt19937_64 rng(77);
  int pooled = 0;
  const int count = 100000;
  for (int i = 0; i < count; ++i) {
    const auto d = limit_draw(est::TtPool{}, sc, rng);
    if (d.value == limit_pooled(sc, d.zeta1, d.zeta2)) ++pooled;
  }
  const double expected = 2.0 * normal_cdf(std::sqrt(3.84)) - 1.0;
  EXPECT_NEAR(static_cast<double>(pooled) / count, 0.95, 0.005);
  EXPECT_NEAR(static_cast<double>(pooled) / count, expected, 4.0 * std::sqrt(0.05 * 0.95 / count));
}

TEST(Limit, OmmseClosedForm) {
  const LocalScenario sc{1.5, 0.4, 0.0};
  const double q = 0.6;
  for (double a : {-1.0, 0.0, 2.0}) {
    for (double b : {-0.5, 1.0}) {
      const double xi = limit_xi(sc, a, b);
      EXPECT_NEAR(limit_value(est::Ommse{}, sc, a, b).value, a + std::sqrt(q) * xi / (1.0 + q * 1.5 * 1.5), 1e-14);
    }
  }
}

TEST(Theorem4Law, Example) {
  const auto law = limit_law_theorem4({5.0, 0.0099, 0.0});
  EXPECT_NEAR(law.mean, 4.9505, 1e-12);
  EXPECT_NEAR(law.variance, 0.0099, 1e-15);
  EXPECT_TRUE(follows_theorem4(est::Pooled{}));
  EXPECT_TRUE(follows_theorem4(est::Alasso{}));
  EXPECT_TRUE(follows_theorem4(est::Gdib{mixing::ammse(), 1.0, 0.1}));
  EXPECT_FALSE(follows_theorem4(est::Gdib{mixing::ammse(), 1.0, std::nullopt}));
  EXPECT_FALSE(follows_theorem4(est::Ammse{}));
}

TEST(Theorem4Law, PooledDrawsMatch) {
  const LocalScenario sc{2.0, 0.1, 0.0};
  const auto draws = limit_draws(est::Pooled{}, sc, 100000, 5);
  double s = 0, s2 = 0;
  for (double v : draws) {
    s += v;
    s2 += v * v;
  }
  const double mean = s / draws.size(), var = s2 / draws.size() - mean * mean;
  EXPECT_NEAR(mean, 1.8, 4.0 * std::sqrt(0.1 / draws.size()));
  EXPECT_NEAR(var, 0.1, 0.003);
}

TEST(Limit, UnsupportedEstimators) {
  const LocalScenario sc{1.0, 0.5, 0.0};
  for (const EstimatorConfig& c : {EstimatorConfig{est::Alasso{}}, EstimatorConfig{est::NormalPrior{}},
                                   EstimatorConfig{est::Lstp{}}, EstimatorConfig{est::Ltr{}}}) {
    try {
      limit_value(c, sc, 0.0, 0.0);
      FAIL() << label(c);
    } catch (const std::invalid_argument& e) {
      EXPECT_STREQ(e.what(), "no closed limit law implemented");
    }
  }
}

TEST(Limit, ValidatesScenario) {
  EXPECT_THROW(validate(LocalScenario{0.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(validate(LocalScenario{0.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(validate(LocalScenario{NAN, 0.5, 0.0}), std::invalid_argument);
}

TEST(LimitDraws, IndependentOfWorkers) {
  const LocalScenario sc{1.58, 0.0099, 0.0};
  const auto a = limit_draws(est::Ebpp{}, sc, 5000, 42, 1);
  const auto b = limit_draws(est::Ebpp{}, sc, 5000, 42, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, limit_draws(est::Ebpp{}, sc, 5000, 43, 1));
}

TEST(LimitSrmse, ExactCases) {
  const LocalScenario sc{3.0, 0.2, 0.0};
  const auto mle = limit_srmse(est::Mle{}, sc, 10, 1);
  EXPECT_TRUE(mle.exact);
  EXPECT_DOUBLE_EQ(mle.srmse, 1.0);
  const auto pooled = limit_srmse(est::Pooled{}, sc, 10, 1);
  EXPECT_TRUE(pooled.exact);
  EXPECT_NEAR(pooled.srmse, std::sqrt(0.2 + 0.64 * 9.0), 1e-14);
}

// Two-dimensional tensor Gauss-Hermite over (zeta1, zeta2).
double gh_limit_mse(const EstimatorConfig& c, const LocalScenario& sc) {
  const auto& rule = gauss_hermite(200);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double v = limit_value(c, sc, rule.nodes[i], rule.nodes[j]).value;
      total += rule.weights[i] * rule.weights[j] * v * v;
    }
  return total;
}

TEST(LimitSrmse, MonteCarloAgreesWithQuadrature) {
  for (const EstimatorConfig& c : {EstimatorConfig{est::Ammse{}}, EstimatorConfig{est::Hdpp{}}}) {
    for (double h : {0.0, 1.58, 5.06}) {
      const LocalScenario sc{h, 0.0099, 0.0};
      const auto r = limit_srmse(c, sc, 200000, 9);
      EXPECT_FALSE(r.exact);
      EXPECT_GT(r.std_error, 0.0);
      EXPECT_NEAR(r.srmse, std::sqrt(gh_limit_mse(c, sc)), 4.0 * r.std_error) << label(c) << " h=" << h;
    }
  }
}

}  // namespace
}  // namespace dib
