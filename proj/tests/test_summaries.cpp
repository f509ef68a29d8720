#include "dib/summaries.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace dib {
namespace {

TEST(Summary, RejectsBadInput) {
  EXPECT_THROW(make_summary(0.0, 0, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(make_summary(0.0, 10, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(make_summary(NAN, 10, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(make_summary(-1e308, 10, 1e308, 10), std::invalid_argument);  // delta overflows
}

TEST(ConflictStats, ZeroConflict) {
  const auto c = conflict_stats(make_summary(0.7, 30, 0.7, 50));
  EXPECT_EQ(c.delta_hat, 0.0);
  EXPECT_EQ(c.xi_hat, 0.0);
}

TEST(ConflictStats, FormulaEvaluation) {
  const auto c = conflict_stats(make_summary(0.0, 100, 1.0, 400));
  EXPECT_NEAR(c.xi_hat, 1.0 / std::sqrt(0.0125), 1e-12);
  EXPECT_NEAR(c.xi_hat, 8.9443, 1e-4);
  EXPECT_NEAR(c.p_finite, 0.2, 1e-15);
}

TEST(ConflictStats, EqualSizes) {
  const auto c = conflict_stats(make_summary(0.2, 50, 0.9, 50));
  EXPECT_NEAR(c.xi_hat, 0.7 * std::sqrt(25.0), 1e-12);
}

TEST(ConflictStats, AntisymmetricUnderSwapWhenSizesMatch) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 500);
    EXPECT_EQ(conflict_stats(make_summary(a, n, b, n)).xi_hat, -conflict_stats(make_summary(b, n, a, n)).xi_hat);
  }
}

TEST(Binomial, WorkedExampleInputs) {
  const auto in = from_raw_binomial({37, 94}, {7680, 20000});
  EXPECT_NEAR(in.raw.theta_hat, 0.3936, 5e-5);
  EXPECT_NEAR(in.current.sd, 0.4886, 5e-5);
  EXPECT_NEAR(in.external.sd, 0.4864, 5e-5);
  // 0.39362 / 0.48855 and 0.384 / 0.48636
  EXPECT_NEAR(in.current.value_st, 0.8057, 5e-5);
  EXPECT_NEAR(in.external.value_st, 0.7895, 5e-5);
  EXPECT_EQ(in.standardized().n, 94);
  EXPECT_EQ(in.standardized().m, 20000);
}

TEST(Binomial, HalfRate) {
  for (std::int64_t k : {1, 7, 1000}) {
    const auto s = standardize_rate({k, 2 * k});
    EXPECT_DOUBLE_EQ(s.sd, 0.5);
    EXPECT_DOUBLE_EQ(s.value_st, 1.0);
  }
}

TEST(Binomial, DegenerateRates) {
  try {
    standardize_rate({0, 10});
    FAIL() << "expected an error";
  } catch (const std::domain_error& e) {
    EXPECT_STREQ(e.what(), "zero sample SD");
  }
  EXPECT_THROW(standardize_rate({10, 10}), std::domain_error);
  EXPECT_THROW(standardize_rate({11, 10}), std::invalid_argument);
  EXPECT_THROW(from_raw_binomial({3, 10}, {0, 5}), std::domain_error);
}

TEST(Binomial, RoundTripsRawRate) {
  for (std::int64_t t = 2; t < 400; t += 7) {
    for (std::int64_t k = 1; k < t; k += 3) {
      const auto s = standardize_rate({k, t});
      EXPECT_NEAR(s.raw(), static_cast<double>(k) / static_cast<double>(t), 1e-12);
    }
  }
}

}  // namespace
}  // namespace dib
