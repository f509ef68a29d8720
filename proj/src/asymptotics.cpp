#include "dib/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "dib/numerics.hpp"
#include "dib/rng.hpp"

namespace dib {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::uint64_t kLimitStream = 0x4c494d4954ULL;

// Mixing weight in the limit: n delta_hat^2 -> xi^2 / (1 - p).
double mixed(const MixingFunction& g, double sens, const LocalScenario& sc, double zeta1, double xi) {
  const double w = g(sens * xi * xi / (1.0 - sc.p), sc.p);
  return zeta1 + w * xi / std::sqrt(1.0 - sc.p);
}

}  // namespace

void validate(const LocalScenario& sc) {
  if (!(sc.p > 0.0 && sc.p < 1.0)) throw std::invalid_argument("scenario: p must lie in (0,1)");
  if (!std::isfinite(sc.h) || !std::isfinite(sc.h_theta)) {
    throw std::invalid_argument("scenario: h and h_theta must be finite");
  }
}

double limit_xi(const LocalScenario& sc, double zeta1, double zeta2) {
  return std::sqrt(1.0 - sc.p) * (sc.h - zeta1) + std::sqrt(sc.p) * zeta2;
}

double limit_pooled(const LocalScenario& sc, double zeta1, double zeta2) {
  return sc.p * zeta1 + std::sqrt(sc.p * (1.0 - sc.p)) * zeta2 + (1.0 - sc.p) * sc.h;
}

double limit_external_mle(const LocalScenario& sc, double zeta2) {
  return std::sqrt(sc.p / (1.0 - sc.p)) * zeta2 + sc.h;
}

bool follows_theorem4(const EstimatorConfig& config) {
  if (std::holds_alternative<est::Pooled>(config) || std::holds_alternative<est::Alasso>(config)) {
    return true;
  }
  const auto* g = std::get_if<est::Gdib>(&config);
  return g && g->tau.has_value();
}

LimitDraw limit_value(const EstimatorConfig& config, const LocalScenario& sc, double zeta1,
                      double zeta2) {
  validate(sc);
  validate(config);
  LimitDraw d;
  d.zeta1 = zeta1;
  d.zeta2 = zeta2;
  d.xi = limit_xi(sc, zeta1, zeta2);
  const double xi = d.xi;
  auto unsupported = [](const auto&) -> double {
    throw std::invalid_argument("no closed limit law implemented");
  };
  d.value = std::visit(
      overloaded{
          [&](const est::Mle&) { return zeta1; },
          [&](const est::Pooled&) { return limit_pooled(sc, zeta1, zeta2); },
          [&](const est::TtPool& e) {
            return xi * xi >= e.c ? zeta1 : limit_pooled(sc, zeta1, zeta2);
          },
          [&](const est::Ommse&) {
            const double q = 1.0 - sc.p;
            return zeta1 + std::sqrt(q) * xi / (1.0 + q * sc.h * sc.h);
          },
          [&](const est::Ammse&) { return mixed(mixing::ammse(), 1.0, sc, zeta1, xi); },
          [&](const est::AmmseS& e) { return mixed(mixing::ammse(), e.sens, sc, zeta1, xi); },
          [&](const est::Gdib& e) {
            if (e.tau) return limit_pooled(sc, zeta1, zeta2);
            return mixed(e.g, e.sens, sc, zeta1, xi);
          },
          [&](const est::Hdpp&) { return mixed(mixing::hdpp(), 1.0, sc, zeta1, xi); },
          [&](const est::Ebpp&) { return mixed(mixing::ebpp(), 1.0, sc, zeta1, xi); },
          [&](const est::PowerPriorFixed& e) {
            const double q = 1.0 - sc.p;
            return zeta1 + std::sqrt(q) * xi * e.gamma / (e.gamma * q + sc.p);
          },
          [&](const est::Alasso& e) { return unsupported(e); },
          [&](const est::NormalPrior& e) { return unsupported(e); },
          [&](const est::Lstp& e) { return unsupported(e); },
          [&](const est::Ltr& e) { return unsupported(e); },
      },
      config);
  return d;
}

LimitDraw limit_draw(const EstimatorConfig& config, const LocalScenario& sc, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  return limit_value(config, sc, z1, z2);
}

std::vector<double> limit_draws(const EstimatorConfig& config, const LocalScenario& sc,
                                std::size_t count, std::uint64_t seed, unsigned workers) {
  validate(sc);
  limit_value(config, sc, 0.0, 0.0);  // reject unsupported kinds up front
  std::vector<double> out(count);
  for_each_block(count, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    auto rng = block_stream(seed, kLimitStream, block);
    for (std::size_t i = begin; i < end; ++i) out[i] = limit_draw(config, sc, rng).value;
  });
  return out;
}

NormalLaw limit_law_theorem4(const LocalScenario& sc) {
  validate(sc);
  return NormalLaw{(1.0 - sc.p) * sc.h, sc.p};
}

LimitRisk limit_srmse(const EstimatorConfig& config, const LocalScenario& sc, std::size_t draws,
                      std::uint64_t seed, unsigned workers) {
  validate(sc);
  if (std::holds_alternative<est::Mle>(config)) return {1.0, 0.0, true};
  if (follows_theorem4(config)) {
    const auto law = limit_law_theorem4(sc);
    return {std::sqrt(law.variance + law.mean * law.mean), 0.0, true};
  }
  if (draws < 2) throw std::invalid_argument("limit_srmse: need at least two draws");
  const auto values = limit_draws(config, sc, draws, seed, workers);
  std::vector<double> squares(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) squares[i] = values[i] * values[i];
  const double count = static_cast<double>(draws);
  const double mean_sq = compensated_sum(squares) / count;
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = (squares[i] - mean_sq) * (squares[i] - mean_sq);
  const double var_sq = compensated_sum(dev) / (count - 1.0);
  const double srmse = std::sqrt(mean_sq);
  const double se = srmse > 0.0 ? std::sqrt(var_sq / count) / (2.0 * srmse) : 0.0;
  return {srmse, se, false};
}

}  // namespace dib
