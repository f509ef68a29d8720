#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dib/summaries.hpp"

namespace dib {

/// Mixing weight g(t) on delta_hat as a function of t = n * delta_hat^2 * s.
/// The second argument is p = n / (n + m), which is all the finite-sample
/// and limiting forms of the built-in functions depend on.
struct MixingFunction {
  std::string name;
  std::function<double(double t, double p)> fn;

  double operator()(double t, double p) const { return fn(t, p); }
};

namespace mixing {
/// m / (n + m + m t): the AMMSE family.
MixingFunction ammse();
/// Empirical-Bayes power prior weight with n delta^2 replaced by t.
MixingFunction ebpp();
/// Hellinger power prior weight with n delta^2 replaced by t.
MixingFunction hdpp();
/// Pooled weight while t (1 - p) < c, zero otherwise.
MixingFunction ttpool(double c);
MixingFunction by_name(std::string_view name);
}  // namespace mixing

namespace est {
struct Mle {};
struct Pooled {};
struct TtPool {
  double c = 3.84;
};
/// Oracle rule using the true conflict. An empty `delta_true` means "bind to
/// the scenario's conflict" (see bind_conflict); estimate() rejects it.
struct Ommse {
  std::optional<double> delta_true;
};
struct Ammse {};
struct AmmseS {
  double sens = 1.0;
};
/// Generalized rule theta_hat + g(n delta_hat^2 s) delta_hat. When `tau` is
/// set the sensitivity is tied to the sample size, s = n^(-2 tau), and
/// `sens` is ignored.
struct Gdib {
  MixingFunction g = mixing::ammse();
  double sens = 1.0;
  std::optional<double> tau;
};
struct Alasso {
  double tau = 0.25;
};
struct PowerPriorFixed {
  double gamma = 1.0;
};
struct Hdpp {};
struct Ebpp {};
struct NormalPrior {};
struct Lstp {
  int v = 3;
};
struct Ltr {};
}  // namespace est

using EstimatorConfig =
    std::variant<est::Mle, est::Pooled, est::TtPool, est::Ommse, est::Ammse, est::AmmseS, est::Gdib,
                 est::Alasso, est::PowerPriorFixed, est::Hdpp, est::Ebpp, est::NormalPrior, est::Lstp,
                 est::Ltr>;

struct EstimateResult {
  double theta_est = 0.0;
  std::optional<double> delta_est;
  std::optional<double> gamma_est;
  std::optional<double> weight;  // realized mixing weight on delta_hat
};

/// Replaces an unbound OMMSE conflict with `delta`; other configs pass
/// through unchanged.
EstimatorConfig bind_conflict(const EstimatorConfig& config, double delta);

/// Throws std::invalid_argument when a tuning parameter is out of range.
void validate(const EstimatorConfig& config);

/// Short stable identifier, e.g. "ammse_s(0.4)"; used as the CSV key.
std::string label(const EstimatorConfig& config);

/// Parses "name" or "name:param[:param]" (e.g. "ttpool:3.84", "gdib:ebpp:0.5",
/// "gdib_tau:ammse:0.1"). Throws std::invalid_argument on unknown input.
EstimatorConfig parse_estimator(std::string_view text);

/// The ten estimators compared in the risk tables, in display order.
std::vector<EstimatorConfig> standard_estimators();

EstimateResult est_mle(const TwoSampleSummary& s);
EstimateResult est_pooled(const TwoSampleSummary& s);
EstimateResult est_ttpool(const TwoSampleSummary& s, double c);
EstimateResult est_ommse(const TwoSampleSummary& s, double delta_true);
EstimateResult est_ammse(const TwoSampleSummary& s);
EstimateResult est_ammse_s(const TwoSampleSummary& s, double sens);
EstimateResult est_gdib(const TwoSampleSummary& s, const MixingFunction& g, double sens);
EstimateResult est_alasso(const TwoSampleSummary& s, double tau);
EstimateResult power_prior_mean(const TwoSampleSummary& s, double gamma);
double gamma_hd(const TwoSampleSummary& s);
double gamma_eb(const TwoSampleSummary& s);
EstimateResult est_hdpp(const TwoSampleSummary& s);
EstimateResult est_ebpp(const TwoSampleSummary& s);
EstimateResult est_np(const TwoSampleSummary& s);
EstimateResult est_lstp(const TwoSampleSummary& s, int v);
EstimateResult est_ltr(const TwoSampleSummary& s);

/// Posterior mode of the conflict under the location-scale t prior with
/// scale 1/sqrt(n); depends on the data only through delta_hat.
double lstp_conflict_mode(double delta_hat, std::int64_t n, std::int64_t m, int v);

/// theta at the profiled optimum for a given conflict estimate delta:
/// (n theta_hat + m (beta_hat - delta)) / (n + m).
double profiled_theta(const TwoSampleSummary& s, double delta);

EstimateResult estimate(const EstimatorConfig& config, const TwoSampleSummary& s);

/// Values of delta_hat at which the estimator map is discontinuous or has a
/// kink, for quadrature panel splitting. Empty for smooth maps.
std::vector<double> conflict_breakpoints(const EstimatorConfig& config, std::int64_t n,
                                         std::int64_t m);

/// True when the estimate is theta_hat + w * delta_hat with w in [0,1] by
/// construction.
bool is_weight_form(const EstimatorConfig& config);

}  // namespace dib
