#include "dib/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "dib/numerics.hpp"

namespace dib {

namespace {

double as_double(std::int64_t k) { return static_cast<double>(k); }

EstimateResult weighted(const TwoSampleSummary& s, double w) {
  EstimateResult r;
  r.theta_est = s.theta_hat + w * s.delta_hat();
  r.weight = w;
  return r;
}

// Power prior weight m gamma / (m gamma + n); zero for gamma == 0.
double power_prior_weight(double gamma, double n, double m) {
  return (m * gamma) / (m * gamma + n);
}

// (1 - sqrt(1 - e^{-x}))^2, written to avoid cancellation for large x.
double hellinger_gamma(double x) {
  const double e = std::exp(-x);
  const double one_minus_root = e / (1.0 + std::sqrt(1.0 - e));
  return one_minus_root * one_minus_root;
}

double ebpp_gamma_from_ratio(double t, double r) {
  // t = n delta^2, r = n/m
  const double denom = std::max(t, 1.0 + r) - 1.0;
  if (t <= 1.0 + r) return 1.0;
  return r / denom;
}

double parse_number(std::string_view text) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

namespace mixing {

MixingFunction ammse() {
  return {"ammse", [](double t, double p) { return 1.0 / (1.0 / (1.0 - p) + t); }};
}

MixingFunction ebpp() {
  return {"ebpp", [](double t, double p) {
            const double r = p / (1.0 - p);
            const double gamma = ebpp_gamma_from_ratio(t, r);
            return gamma / (gamma + r);
          }};
}

MixingFunction hdpp() {
  return {"hdpp", [](double t, double p) {
            const double r = p / (1.0 - p);
            const double gamma = hellinger_gamma(t / 8.0);
            return gamma / (gamma + r);
          }};
}

MixingFunction ttpool(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("ttpool: c must be positive");
  return {"ttpool(" + format_double(c) + ")",
          [c](double t, double p) { return t * (1.0 - p) >= c ? 0.0 : 1.0 - p; }};
}

MixingFunction by_name(std::string_view name) {
  if (name == "ammse") return ammse();
  if (name == "ebpp") return ebpp();
  if (name == "hdpp") return hdpp();
  if (name == "ttpool") return ttpool(3.84);
  throw std::invalid_argument("unknown mixing function '" + std::string(name) + "'");
}

}  // namespace mixing

EstimatorConfig bind_conflict(const EstimatorConfig& config, double delta) {
  if (const auto* o = std::get_if<est::Ommse>(&config); o && !o->delta_true) {
    return est::Ommse{delta};
  }
  return config;
}

void validate(const EstimatorConfig& config) {
  std::visit(overloaded{
                 [](const est::TtPool& e) {
                   if (!(e.c > 0.0)) throw std::invalid_argument("ttpool: c must be positive");
                 },
                 [](const est::Ommse& e) {
                   if (e.delta_true && !std::isfinite(*e.delta_true)) {
                     throw std::invalid_argument("ommse: conflict must be finite");
                   }
                 },
                 [](const est::AmmseS& e) {
                   if (!(e.sens >= 0.0)) throw std::invalid_argument("ammse_s: sensitivity must be >= 0");
                 },
                 [](const est::Gdib& e) {
                   if (!e.g.fn) throw std::invalid_argument("gdib: missing mixing function");
                   if (e.tau) {
                     if (!std::isfinite(*e.tau)) throw std::invalid_argument("gdib: tau must be finite");
                   } else if (!(e.sens >= 0.0)) {
                     throw std::invalid_argument("gdib: sensitivity must be >= 0");
                   }
                 },
                 [](const est::Alasso& e) {
                   if (!(e.tau > 0.0 && e.tau < 0.5)) throw std::invalid_argument("alasso: tau must lie in (0, 0.5)");
                 },
                 [](const est::PowerPriorFixed& e) {
                   if (!(e.gamma > 0.0 && e.gamma <= 1.0)) {
                     throw std::invalid_argument("power prior: gamma must lie in (0, 1]");
                   }
                 },
                 [](const est::Lstp& e) {
                   if (e.v < 3) throw std::invalid_argument("lstp: v must be >= 3");
                 },
                 [](const auto&) {},
             },
             config);
}

std::string label(const EstimatorConfig& config) {
  return std::visit(
      overloaded{
          [](const est::Mle&) -> std::string { return "mle"; },
          [](const est::Pooled&) -> std::string { return "pooled"; },
          [](const est::TtPool& e) -> std::string {
            return e.c == 3.84 ? "ttpool" : "ttpool(" + format_double(e.c) + ")";
          },
          [](const est::Ommse& e) -> std::string {
            return e.delta_true ? "ommse(" + format_double(*e.delta_true) + ")" : "ommse";
          },
          [](const est::Ammse&) -> std::string { return "ammse"; },
          [](const est::AmmseS& e) -> std::string { return "ammse_s(" + format_double(e.sens) + ")"; },
          [](const est::Gdib& e) -> std::string {
            if (e.tau) return "gdib(" + e.g.name + ",tau=" + format_double(*e.tau) + ")";
            return "gdib(" + e.g.name + "," + format_double(e.sens) + ")";
          },
          [](const est::Alasso& e) -> std::string {
            return e.tau == 0.25 ? "alasso" : "alasso(" + format_double(e.tau) + ")";
          },
          [](const est::PowerPriorFixed& e) -> std::string { return "pp(" + format_double(e.gamma) + ")"; },
          [](const est::Hdpp&) -> std::string { return "hdpp"; },
          [](const est::Ebpp&) -> std::string { return "ebpp"; },
          [](const est::NormalPrior&) -> std::string { return "np"; },
          [](const est::Lstp& e) -> std::string { return e.v == 3 ? "lstp" : "lstp(" + std::to_string(e.v) + ")"; },
          [](const est::Ltr&) -> std::string { return "ltr"; },
      },
      config);
}

EstimatorConfig parse_estimator(std::string_view text) {
  const auto parts = split(text, ':');
  const auto name = parts[0];
  auto arg = [&](std::size_t i) {
    if (parts.size() <= i) throw std::invalid_argument("estimator '" + std::string(text) + "' needs a parameter");
    return parse_number(parts[i]);
  };
  auto expect = [&](std::size_t count) {
    if (parts.size() > count) throw std::invalid_argument("estimator '" + std::string(text) + "' has extra parameters");
  };
  EstimatorConfig out;
  if (name == "mle") {
    expect(1);
    out = est::Mle{};
  } else if (name == "pooled") {
    expect(1);
    out = est::Pooled{};
  } else if (name == "ttpool") {
    expect(2);
    out = est::TtPool{parts.size() > 1 ? arg(1) : 3.84};
  } else if (name == "ommse") {
    expect(2);
    out = parts.size() > 1 ? est::Ommse{arg(1)} : est::Ommse{};
  } else if (name == "ammse") {
    expect(1);
    out = est::Ammse{};
  } else if (name == "ammse_s") {
    expect(2);
    out = est::AmmseS{arg(1)};
  } else if (name == "gdib" || name == "gdib_tau") {
    expect(3);
    if (parts.size() < 3) throw std::invalid_argument("gdib needs 'gdib:<g>:<value>'");
    est::Gdib g{mixing::by_name(parts[1]), 1.0, std::nullopt};
    if (name == "gdib") {
      g.sens = arg(2);
    } else {
      g.tau = arg(2);
    }
    out = g;
  } else if (name == "alasso") {
    expect(2);
    out = est::Alasso{parts.size() > 1 ? arg(1) : 0.25};
  } else if (name == "pp") {
    expect(2);
    out = est::PowerPriorFixed{arg(1)};
  } else if (name == "hdpp") {
    expect(1);
    out = est::Hdpp{};
  } else if (name == "ebpp") {
    expect(1);
    out = est::Ebpp{};
  } else if (name == "np") {
    expect(1);
    out = est::NormalPrior{};
  } else if (name == "lstp") {
    expect(2);
    out = est::Lstp{parts.size() > 1 ? static_cast<int>(arg(1)) : 3};
  } else if (name == "ltr") {
    expect(1);
    out = est::Ltr{};
  } else {
    throw std::invalid_argument("unknown estimator '" + std::string(text) + "'");
  }
  validate(out);
  return out;
}

std::vector<EstimatorConfig> standard_estimators() {
  return {est::Mle{},  est::Pooled{}, est::NormalPrior{}, est::Ammse{}, est::TtPool{},
          est::Alasso{}, est::Ebpp{}, est::Hdpp{},        est::Ltr{},   est::Lstp{}};
}

EstimateResult est_mle(const TwoSampleSummary& s) {
  validate(s);
  return weighted(s, 0.0);
}

EstimateResult est_pooled(const TwoSampleSummary& s) {
  validate(s);
  const double w = as_double(s.m) / as_double(s.n + s.m);
  EstimateResult r;
  r.theta_est = s.pooled();
  r.weight = w;
  return r;
}

EstimateResult est_ttpool(const TwoSampleSummary& s, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("ttpool: c must be positive");
  const auto stats = conflict_stats(s);
  if (stats.xi_hat * stats.xi_hat >= c) return est_mle(s);
  return est_pooled(s);
}

EstimateResult est_ommse(const TwoSampleSummary& s, double delta_true) {
  validate(s);
  if (!std::isfinite(delta_true)) throw std::invalid_argument("ommse: conflict must be finite");
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  return weighted(s, m / (n + m + n * m * delta_true * delta_true));
}

EstimateResult est_ammse(const TwoSampleSummary& s) { return est_ommse(s, s.delta_hat()); }

EstimateResult est_ammse_s(const TwoSampleSummary& s, double sens) {
  validate(s);
  if (!(sens >= 0.0)) throw std::invalid_argument("ammse_s: sensitivity must be >= 0");
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  const double d = s.delta_hat();
  return weighted(s, m / (n + m + m * n * d * d * sens));
}

EstimateResult est_gdib(const TwoSampleSummary& s, const MixingFunction& g, double sens) {
  validate(s);
  if (!(sens >= 0.0)) throw std::invalid_argument("gdib: sensitivity must be >= 0");
  const double d = s.delta_hat();
  const double w = g(as_double(s.n) * d * d * sens, s.p_finite());
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("invalid mixing function");
  return weighted(s, w);
}

EstimateResult est_alasso(const TwoSampleSummary& s, double tau) {
  validate(s);
  if (!(tau > 0.0 && tau < 0.5)) throw std::invalid_argument("alasso: tau must lie in (0, 0.5)");
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  const double d = s.delta_hat();
  double delta_star = 0.0;
  if (d != 0.0) {
    // Profiling theta leaves (nm/(n+m))(d - delta)^2 + (n+m)^tau |delta|/|d|,
    // whose minimizer soft-thresholds d.
    const double threshold = std::pow(n + m, 1.0 + tau) / (2.0 * n * m * std::abs(d));
    delta_star = std::copysign(std::max(0.0, std::abs(d) - threshold), d);
  }
  EstimateResult r;
  r.theta_est = profiled_theta(s, delta_star);
  r.delta_est = delta_star;
  r.weight = m / (n + m) * (d != 0.0 ? 1.0 - delta_star / d : 1.0);
  return r;
}

EstimateResult power_prior_mean(const TwoSampleSummary& s, double gamma) {
  validate(s);
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("power prior: gamma must lie in (0, 1]");
  auto r = weighted(s, power_prior_weight(gamma, as_double(s.n), as_double(s.m)));
  r.gamma_est = gamma;
  return r;
}

double gamma_hd(const TwoSampleSummary& s) {
  validate(s);
  const double d = s.delta_hat();
  return hellinger_gamma(as_double(s.n) * d * d / 8.0);
}

double gamma_eb(const TwoSampleSummary& s) {
  validate(s);
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  const double d = s.delta_hat();
  return ebpp_gamma_from_ratio(n * d * d, n / m);
}

EstimateResult est_hdpp(const TwoSampleSummary& s) {
  const double gamma = gamma_hd(s);
  auto r = weighted(s, power_prior_weight(gamma, as_double(s.n), as_double(s.m)));
  r.gamma_est = gamma;
  return r;
}

EstimateResult est_ebpp(const TwoSampleSummary& s) {
  const double gamma = gamma_eb(s);
  auto r = weighted(s, power_prior_weight(gamma, as_double(s.n), as_double(s.m)));
  r.gamma_est = gamma;
  return r;
}

EstimateResult est_np(const TwoSampleSummary& s) {
  validate(s);
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  const double w = m / (2.0 * m + n);
  auto r = weighted(s, w);
  r.delta_est = s.delta_hat() * w;
  return r;
}

double profiled_theta(const TwoSampleSummary& s, double delta) {
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  return (n * s.theta_hat + m * (s.beta_hat - delta)) / (n + m);
}

double lstp_conflict_mode(double delta_hat, std::int64_t n_, std::int64_t m_, int v) {
  if (v < 3) throw std::invalid_argument("lstp: v must be >= 3");
  if (delta_hat == 0.0) return 0.0;
  const double n = as_double(n_);
  const double m = as_double(m_);
  const double k = n * m / (n + m);
  const double vv = static_cast<double>(v);
  auto objective = [&](double x) {
    return 0.5 * (vv + 1.0) * std::log(vv + n * x * x) + 0.5 * k * (delta_hat - x) * (delta_hat - x);
  };
  auto slope = [&](double x) { return (vv + 1.0) * n * x / (vv + n * x * x) - k * (delta_hat - x); };
  const double sd = conflict_sd(n_, m_);
  const double lo = std::min(0.0, delta_hat) - 5.0 * sd;
  const double hi = std::max(0.0, delta_hat) + 5.0 * sd;
  constexpr std::size_t kGrid = 1000;
  const double step = (hi - lo) / static_cast<double>(kGrid - 1);
  std::size_t best = 0;
  double best_val = objective(lo);
  for (std::size_t i = 1; i < kGrid; ++i) {
    const double val = objective(lo + step * static_cast<double>(i));
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  const double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double b = lo + step * static_cast<double>(std::min(best + 1, kGrid - 1));
  if (slope(a) < 0.0 && slope(b) > 0.0) return find_root(slope, a, b, 1e-13);
  return minimize_scanned(objective, a, b, 3, 1e-10);
}

EstimateResult est_lstp(const TwoSampleSummary& s, int v) {
  validate(s);
  const double d = s.delta_hat();
  const double delta_star = lstp_conflict_mode(d, s.n, s.m, v);
  EstimateResult r;
  r.theta_est = profiled_theta(s, delta_star);
  r.delta_est = delta_star;
  const double q = as_double(s.m) / as_double(s.n + s.m);
  r.weight = d != 0.0 ? q * (1.0 - delta_star / d) : q;
  return r;
}

EstimateResult est_ltr(const TwoSampleSummary& s) {
  validate(s);
  const double n = as_double(s.n);
  const double m = as_double(s.m);
  const double d = s.delta_hat();
  const double big_m = conflict_sd(s.n, s.m);
  const double c = big_m * (2.0 * m + n) / (m + n);
  const double shift = big_m * m / (m + n);
  if (std::abs(d) <= c) return est_np(s);
  // Outside the Bayes region the move away from theta_hat is capped at the
  // value it reaches on the boundary |d| = C.
  EstimateResult r;
  const double sign = d > 0.0 ? 1.0 : -1.0;
  r.theta_est = s.theta_hat + sign * shift;
  r.delta_est = d - sign * big_m;
  r.weight = shift / std::abs(d);
  return r;
}

EstimateResult estimate(const EstimatorConfig& config, const TwoSampleSummary& s) {
  validate(config);
  return std::visit(
      overloaded{
          [&](const est::Mle&) { return est_mle(s); },
          [&](const est::Pooled&) { return est_pooled(s); },
          [&](const est::TtPool& e) { return est_ttpool(s, e.c); },
          [&](const est::Ommse& e) {
            if (!e.delta_true) throw std::invalid_argument("ommse: conflict not bound");
            return est_ommse(s, *e.delta_true);
          },
          [&](const est::Ammse&) { return est_ammse(s); },
          [&](const est::AmmseS& e) { return est_ammse_s(s, e.sens); },
          [&](const est::Gdib& e) {
            const double sens = e.tau ? std::pow(as_double(s.n), -2.0 * *e.tau) : e.sens;
            return est_gdib(s, e.g, sens);
          },
          [&](const est::Alasso& e) { return est_alasso(s, e.tau); },
          [&](const est::PowerPriorFixed& e) { return power_prior_mean(s, e.gamma); },
          [&](const est::Hdpp&) { return est_hdpp(s); },
          [&](const est::Ebpp&) { return est_ebpp(s); },
          [&](const est::NormalPrior&) { return est_np(s); },
          [&](const est::Lstp& e) { return est_lstp(s, e.v); },
          [&](const est::Ltr&) { return est_ltr(s); },
      },
      config);
}

std::vector<double> conflict_breakpoints(const EstimatorConfig& config, std::int64_t n_,
                                         std::int64_t m_) {
  const double n = as_double(n_);
  const double m = as_double(m_);
  const double sd = conflict_sd(n_, m_);
  auto pair = [](double x) { return std::vector<double>{-x, x}; };
  return std::visit(
      overloaded{
          [&](const est::TtPool& e) { return pair(std::sqrt(e.c) * sd); },
          [&](const est::Ebpp&) { return pair(sd); },
          [&](const est::Ltr&) { return pair(sd * (2.0 * m + n) / (m + n)); },
          [&](const est::Alasso& e) {
            return pair(std::sqrt(std::pow(n + m, 1.0 + e.tau) / (2.0 * n * m)));
          },
          [&](const est::Gdib& e) {
            const double sens = e.tau ? std::pow(n, -2.0 * *e.tau) : e.sens;
            if (!(sens > 0.0)) return std::vector<double>{};
            if (e.g.name == "ebpp") return pair(sd / std::sqrt(sens));
            if (e.g.name.rfind("ttpool", 0) == 0) {
              // t (1 - p) = c  <=>  n d^2 s m/(n+m) = c
              const double c = std::stod(e.g.name.substr(7));
              return pair(std::sqrt(c * (n + m) / (n * m * sens)));
            }
            return std::vector<double>{};
          },
          [](const auto&) { return std::vector<double>{}; },
      },
      config);
}

bool is_weight_form(const EstimatorConfig& config) {
  return std::visit(overloaded{
                        [](const est::Mle&) { return true; },
                        [](const est::Pooled&) { return true; },
                        [](const est::TtPool&) { return true; },
                        [](const est::Ommse&) { return true; },
                        [](const est::Ammse&) { return true; },
                        [](const est::AmmseS&) { return true; },
                        [](const est::Gdib&) { return true; },
                        [](const est::PowerPriorFixed&) { return true; },
                        [](const est::Hdpp&) { return true; },
                        [](const est::Ebpp&) { return true; },
                        [](const est::NormalPrior&) { return true; },
                        [](const auto&) { return false; },
                    },
                    config);
}

}  // namespace dib
