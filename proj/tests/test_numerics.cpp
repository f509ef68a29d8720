#include "dib/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

namespace dib {
namespace {

TEST(GaussHermite, WeightsSumToOne) {
  for (std::size_t k : {2u, 16u, 96u, 128u, 256u}) {
    const auto& rule = gauss_hermite(k);
    ASSERT_EQ(rule.nodes.size(), k);
    EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 1.0, 1e-13) << k;
  }
}

// E[Z^2k] = (2k-1)!!, exact for a rule with enough nodes.
TEST(GaussHermite, EvenMomentsExact) {
  const auto& rule = gauss_hermite(32);
  double double_factorial = 1.0;
  for (int k = 1; k <= 8; ++k) {
    double_factorial *= 2 * k - 1;
    double m = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) m += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
    EXPECT_NEAR(m / double_factorial, 1.0, 1e-11) << "moment " << 2 * k;
  }
}

TEST(GaussHermite, SymmetricNodes) {
  const auto& rule = gauss_hermite(64);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_NEAR(rule.nodes[i], -rule.nodes[63 - i], 1e-13);
    EXPECT_NEAR(rule.weights[i], rule.weights[63 - i], 1e-16);
  }
}

TEST(Integrate, SmoothAndKinked) {
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value, 2.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, std::vector<double>{0.3}).value,
              0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-13);
  // a jump that is not announced as a breakpoint still converges
  EXPECT_NEAR(integrate([](double x) { return x < 0.123 ? 1.0 : 0.0; }, 0.0, 1.0, {}, {1e-10, 1e-10, 20}).value,
              0.123, 1e-9);
}

TEST(Integrate, NormalDensityMass) {
  EXPECT_NEAR(integrate(normal_pdf, -12.0, 12.0).value, 1.0, 1e-13);
}

TEST(Integrate, NonFiniteThrows) {
  EXPECT_THROW(integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericalError);
}

TEST(Normal, TailsAndQuantile) {
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_ccdf(10.0), 7.619853024160527e-24, 1e-36);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_THROW(normal_quantile(0.0), std::domain_error);
}

TEST(Roots, Toms748AndScannedMinimum) {
  EXPECT_NEAR(find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0), std::sqrt(2.0), 1e-12);
  EXPECT_THROW(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), NumericalError);
  // two basins, the deeper one on the right
  auto f = [](double x) { return (x * x - 1.0) * (x * x - 1.0) - 0.1 * x; };
  EXPECT_NEAR(minimize_scanned(f, -2.0, 2.0, 101, 1e-12), 1.0124, 1e-3);
  EXPECT_GT(minimize_scanned(f, -2.0, 2.0, 101, 1e-12), 0.0);
}

TEST(CompensatedSum, CancelsRoundoff) {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(compensated_sum(v), 2.0);
}

TEST(FormatDouble, RoundTrip) {
  EXPECT_EQ(format_double(0.4), "0.4");
  EXPECT_EQ(format_double(1e-6), "1e-06");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

}  // namespace
}  // namespace dib
