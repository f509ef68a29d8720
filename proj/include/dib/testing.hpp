#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dib/estimators.hpp"
#include "dib/summaries.hpp"

namespace dib {

namespace convention {
/// Type 1 error controlled for every conflict.
struct AllDelta {};
/// Critical value computed at zero conflict.
struct DeltaZero {};
/// Type 1 error controlled for conflicts in [0, delta0].
struct DeltaBounded {
  double delta0 = 0.0636;
};
}  // namespace convention

using Convention = std::variant<convention::AllDelta, convention::DeltaZero, convention::DeltaBounded>;

std::string label(const Convention& c);

/// One-sided upper test of theta = theta0 with statistic
/// Z = sqrt(n)(T - theta0), T the estimator.
struct TestSpec {
  double theta0 = 0.0;
  double alpha = 0.025;
  Convention convention = convention::DeltaZero{};
  EstimatorConfig estimator = est::Mle{};
  std::int64_t n = 1000;
  std::int64_t m = 100000;
  /// Search negative conflicts as well (|delta| <= delta0, or all delta).
  bool signed_conflict = false;
};

void validate(const TestSpec& spec);

struct CriticalValue {
  double z = 0.0;                 // on the sqrt(n) scale; +inf when unbounded
  double delta_at_sup = 0.0;      // conflict attaining the sup
  bool unbounded = false;
  bool boundary_warning = false;  // sup attained at the grid edge
};

/// Upper 1-alpha quantile of Z at (theta0, delta).
double null_quantile(const TestSpec& spec, double delta);

/// Critical value under the spec's convention. An empty grid selects the
/// default: 201 points on [0, delta0] for DeltaBounded, sqrt(n) delta in
/// [0, 30] by 0.1 for AllDelta. The sup is refined between grid points, and
/// AllDelta extends the grid by doubling while the quantile keeps growing.
CriticalValue critical_value(const TestSpec& spec, const std::vector<double>& delta_grid = {});

/// Pr(Z > critical | theta, delta).
double power(const TestSpec& spec, double critical, double theta, double delta);

struct PowerCurve {
  std::string estimator;
  std::string convention;
  double critical = 0.0;
  double theta = 0.0;
  std::vector<double> delta;
  std::vector<double> rejection;
};

PowerCurve power_curve(const TestSpec& spec, const CriticalValue& critical, double theta,
                       const std::vector<double>& delta_grid, unsigned workers = 1);

struct SweetSpot {
  std::optional<double> lo;  // empty when no conflict gives a power gain
  std::optional<double> hi;
  double candidate_lo = 0.0;  // analytic candidate (delta0 - theta, delta0)
  double candidate_hi = 0.0;
  double max_gain = 0.0;      // largest power difference over the grid
  double delta_at_max_gain = 0.0;
};

/// Conflicts in [0, delta0] where the test built on the spec's estimator is
/// more powerful than the MLE test at `theta`; both tests use their
/// DeltaBounded critical values. Reports the longest run on a `grid_points`
/// grid with edges refined by root finding.
SweetSpot sweet_spot(const TestSpec& spec, double theta, std::size_t grid_points = 201,
                     double min_gain = 0.0);

struct P2P3 {
  double p2 = 0.0;
  double p3 = 0.0;
};

/// Plug-in estimates of Pr(delta0 - (theta_hat - theta0) < delta_hat < delta0)
/// and Pr(delta_hat < delta0), with (theta_hat, delta_hat) jointly normal
/// around the observed values (variances 1/n and 1/n + 1/m, covariance -1/n).
P2P3 p2_p3(const TwoSampleSummary& s, double delta0, double theta0);

enum class PValueOption { MleAllDelta, PooledDeltaZero, DibDeltaBounded };

struct PValue {
  double statistic = 0.0;  // observed sqrt(n)(T - theta0)
  double p = 0.0;
  double std_error = 0.0;  // Monte Carlo only
};

/// One-sided upper p-values on the summary's own scale. The DIB option uses
/// AMMSE_S(sens) at conflict delta0, exactly by quadrature, or by Monte Carlo
/// when mc_draws > 0.
PValue pvalue(PValueOption option, const TwoSampleSummary& s, double theta0, double delta0,
              double sens, std::size_t mc_draws = 0, std::uint64_t seed = 1, unsigned workers = 1);

/// Smallest delta0 > 0 at which the DIB p-value reaches target_p, found by
/// a scan over [0, max_delta0] followed by root finding. Throws
/// NumericalError when the p-value never crosses the target.
double tipping_point(const TwoSampleSummary& s, double theta0, double sens, double target_p,
                     double max_delta0 = 1.0);

struct PowerDecayRow {
  std::int64_t n = 0;
  std::int64_t m = 0;
  double critical = 0.0;
  double power = 0.0;
};

/// AllDelta power at theta = h_theta / sqrt(n), delta = h / sqrt(n) for each
/// n in the ladder with m = 100 n.
std::vector<PowerDecayRow> local_power_decay(const EstimatorConfig& config, double h_theta, double h,
                                             const std::vector<std::int64_t>& n_ladder,
                                             double alpha = 0.025, unsigned workers = 1);

std::vector<PowerDecayRow> alasso_local_power_decay(double tau, double h_theta, double h,
                                                    const std::vector<std::int64_t>& n_ladder,
                                                    double alpha = 0.025, unsigned workers = 1);

}  // namespace dib
