#include "dib/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "dib/asymptotics.hpp"
#include "dib/estimators.hpp"
#include "dib/montecarlo.hpp"
#include "dib/numerics.hpp"
#include "dib/prams.hpp"
#include "dib/report.hpp"
#include "dib/risk.hpp"
#include "dib/testing.hpp"

namespace dib {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::set<std::string> kSubcommands = {"estimate",         "srmse-curve", "bayes-risk-table",
                                            "power",            "densities",   "example-prams",
                                            "asymptotics-check"};

constexpr std::size_t kDeskBootstrap = 100000;
constexpr std::size_t kFullBootstrap = 10000000;

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

std::string fmt(double x) { return format_double(x); }

std::string fmt_opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::vector<EstimatorConfig> parse_estimators(const std::vector<std::string>& names,
                                              std::vector<EstimatorConfig> fallback) {
  if (names.empty()) return fallback;
  std::vector<EstimatorConfig> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse_estimator(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::vector<EstimatorConfig> with_ommse(std::vector<EstimatorConfig> v) {
  v.push_back(est::Ommse{});
  return v;
}

fs::path out_dir(const RunConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "dib_out";
}

Convention parse_convention(const std::string& name, double delta0) {
  if (name == "all_delta") return convention::AllDelta{};
  if (name == "delta_zero") return convention::DeltaZero{};
  if (name == "delta_bounded") return convention::DeltaBounded{delta0};
  throw ConfigError("unknown convention '" + name + "'");
}

void validate_run(const RunConfig& c) {
  if (c.subcommand.empty()) throw ConfigError("a subcommand is required (positional or in --config)");
  if (!kSubcommands.count(c.subcommand)) throw ConfigError("unknown subcommand '" + c.subcommand + "'");
  if (c.n < 1 || c.m < 1) throw ConfigError("n and m must be positive");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(c.sens >= 0.0)) throw ConfigError("sens must be >= 0");
  if (!(c.delta0 > 0.0)) throw ConfigError("delta0 must be positive");
  if (c.bootstrap_scheme != "parametric" && c.bootstrap_scheme != "nonparametric") {
    throw ConfigError("bootstrap_scheme must be 'parametric' or 'nonparametric'");
  }
}

// ---- subcommands -----------------------------------------------------------

int cmd_estimate(const RunConfig& c, std::ostream& out) {
  TwoSampleSummary s;
  try {
    s = make_summary(c.theta_hat, c.n, c.beta_hat, c.m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto ests = parse_estimators(c.estimators, standard_estimators());
  CsvTable table({"estimator", "theta_est", "delta_est", "gamma_est", "weight"});
  for (const auto& e : ests) {
    if (const auto* o = std::get_if<est::Ommse>(&e); o && !o->delta_true) {
      throw ConfigError("ommse needs a conflict value, e.g. 'ommse:0.1'");
    }
    const auto r = estimate(e, s);
    table.add_row({label(e), fmt(r.theta_est), fmt_opt(r.delta_est), fmt_opt(r.gamma_est), fmt_opt(r.weight)});
  }
  const auto text = table.str();
  write_file(out_dir(c) / "estimate.csv", text);
  out << text;
  return kExitOk;
}

int cmd_srmse_curve(const RunConfig& c, std::ostream& out) {
  const auto ests = parse_estimators(c.estimators, with_ommse(standard_estimators()));
  const auto grid_h = c.sqrt_n_delta_grid.empty() ? arange(0.0, 8.0, 0.1) : c.sqrt_n_delta_grid;
  const double rn = std::sqrt(static_cast<double>(c.n));
  std::vector<double> grid;
  for (double h : grid_h) grid.push_back(h / rn);

  CsvTable table({"estimator", "sqrt_n_delta", "srmse"});
  std::vector<PlotSeries> series;
  for (const auto& e : ests) {
    auto curve = srmse_curve(e, c.n, c.m, grid, c.workers);
    for (std::size_t i = 0; i < grid.size(); ++i) table.add_row({curve.estimator, fmt(grid_h[i]), fmt(curve.srmse[i])});
    series.push_back({curve.estimator, grid_h, curve.srmse});
    out << curve.estimator << " max_srmse=" << fmt(*std::max_element(curve.srmse.begin(), curve.srmse.end())) << '\n';
  }
  write_file(out_dir(c) / "srmse_curve.csv", table.str());
  if (c.plot) {
    emit_plot(series, {"SRMSE by conflict", "sqrt(n) delta", "SRMSE", 900, 520, 0.0, std::nullopt, std::nullopt},
              out_dir(c) / "srmse_curve.svg");
  }
  return kExitOk;
}

int cmd_bayes_risk_table(const RunConfig& c, std::ostream& out) {
  const auto ests = parse_estimators(c.estimators, with_ommse(standard_estimators()));
  std::vector<ConflictPrior> priors;
  if (c.priors.empty()) {
    priors = table_priors(c.n, c.m);
  } else {
    for (const auto& p : c.priors) priors.push_back(parse_prior(p));
  }
  const auto cells = risk_table(ests, priors, c.n, c.m, c.workers);
  CsvTable table({"estimator", "prior", "value"});
  for (const auto& cell : cells) table.add_row({cell.estimator, cell.prior, fmt(cell.value)});
  write_file(out_dir(c) / "bayes_risk_table.csv", table.str());

  for (std::size_t i = 0; i < ests.size(); ++i) {
    out << label(ests[i]);
    for (std::size_t j = 0; j < priors.size(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %8.3f", cells[i * priors.size() + j].value);
      out << buf;
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_power(const RunConfig& c, std::ostream& out) {
  const std::vector<EstimatorConfig> fallback = {est::Mle{},    est::Pooled{}, est::NormalPrior{}, est::Ammse{},
                                                 est::TtPool{}, est::Alasso{}, est::Ebpp{},        est::Hdpp{},
                                                 est::Ltr{},    est::Lstp{}};
  const auto ests = parse_estimators(c.estimators, fallback);
  const std::vector<std::string> conventions =
      c.conventions.empty() ? std::vector<std::string>{"all_delta", "delta_zero", "delta_bounded"} : c.conventions;
  const auto thetas = c.thetas.empty() ? std::vector<double>{0.0, 0.03, 0.06, 0.09} : c.thetas;
  const auto deltas = c.delta_grid.empty() ? arange(0.0, 0.2, 0.004) : c.delta_grid;

  CsvTable table({"estimator", "convention", "theta", "delta", "critical", "rejection_prob"});
  for (const auto& name : conventions) {
    const auto conv = parse_convention(name, c.delta0);
    std::map<double, std::vector<PlotSeries>> plots;
    for (const auto& e : ests) {
      TestSpec spec;
      spec.theta0 = c.theta0;
      spec.alpha = c.alpha;
      spec.convention = conv;
      spec.estimator = e;
      spec.n = c.n;
      spec.m = c.m;
      const auto crit = critical_value(spec);
      out << label(conv) << ' ' << label(e) << " critical=" << fmt(crit.z) << '\n';
      for (double theta : thetas) {
        const auto curve = power_curve(spec, crit, theta, deltas, c.workers);
        for (std::size_t i = 0; i < deltas.size(); ++i) {
          table.add_row({curve.estimator, curve.convention, fmt(theta), fmt(deltas[i]), fmt(crit.z),
                         fmt(curve.rejection[i])});
        }
        plots[theta].push_back({curve.estimator, deltas, curve.rejection});
      }
    }
    if (c.plot) {
      for (const auto& [theta, series] : plots) {
        PlotStyle style{"Rejection rate, " + label(conv) + ", theta=" + fmt(theta), "delta", "rejection probability",
                        900, 520, 0.0, 1.0, std::nullopt};
        if (name == "delta_bounded") style.vline = c.delta0;
        emit_plot(series, style, out_dir(c) / ("power_" + name + "_theta" + fmt(theta) + ".svg"));
      }
    }
  }
  write_file(out_dir(c) / "power.csv", table.str());
  return kExitOk;
}

int cmd_densities(const RunConfig& c, std::ostream& out) {
  const auto ests = parse_estimators(c.estimators, standard_estimators());
  const auto scenarios = c.sqrt_n_delta_grid.empty() ? std::vector<double>{0.0, 0.32, 1.58, 5.06} : c.sqrt_n_delta_grid;
  const std::size_t reps = c.replicates ? c.replicates : 50000;
  const auto xs = arange(-4.0, 9.0, 0.05);
  const double rn = std::sqrt(static_cast<double>(c.n));

  CsvTable table({"estimator", "sqrt_n_delta_scenario", "x", "log_density"});
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    SimPlan plan;
    plan.n = c.n;
    plan.m = c.m;
    plan.theta = 0.0;
    plan.delta = scenarios[k] / rn;
    plan.replicates = reps;
    plan.seed = c.seed + k;
    plan.estimators = ests;
    const auto dists = simulate(plan, c.workers);
    std::vector<PlotSeries> series;
    for (const auto& e : ests) {
      const auto& d = dists.at(label(e));
      const auto logd = kde_log_density(d, xs, 0.0, c.workers);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        table.add_row({label(e), fmt(scenarios[k]), fmt(xs[i]), fmt(logd[i])});
      }
      series.push_back({label(e), xs, logd});
      out << "h=" << fmt(scenarios[k]) << ' ' << label(e) << " mean=" << fmt(d.mean())
          << " var=" << fmt(d.variance()) << " failures=" << d.failures() << '\n';
    }
    if (c.plot) {
      emit_plot(series,
                {"Log density, sqrt(n) delta=" + fmt(scenarios[k]), "sqrt(n)(estimate - theta)", "log density", 900,
                 520, -12.0, std::nullopt, std::nullopt},
                out_dir(c) / ("densities_h" + fmt(scenarios[k]) + ".svg"));
    }
  }
  write_file(out_dir(c) / "densities.csv", table.str());
  return kExitOk;
}

int cmd_example_prams(const RunConfig& c, std::ostream& out) {
  PramsOptions opts;
  opts.sens = c.sens;
  opts.resamples = c.bootstrap_resamples ? c.bootstrap_resamples : (c.full_fidelity ? kFullBootstrap : kDeskBootstrap);
  opts.scheme = c.bootstrap_scheme == "parametric" ? BootstrapScheme::Parametric : BootstrapScheme::Nonparametric;
  opts.mc_draws = c.replicates;
  opts.seed = c.seed;
  opts.workers = c.workers;
  const auto r = run_prams(opts);

  CsvTable table({"quantity", "value"});
  auto add = [&](const std::string& k, double v) { table.add_row({k, fmt(v)}); };
  add("theta_hat_rate", r.ingest.raw.theta_hat);
  add("beta_hat_rate", r.ingest.raw.beta_hat);
  add("sd_current", r.ingest.current.sd);
  add("sd_external", r.ingest.external.sd);
  add("theta_hat_st", r.ingest.current.value_st);
  add("beta_hat_st", r.ingest.external.value_st);
  add("theta0_st", r.theta0_st);
  add("estimate_st", r.estimate_st);
  add("estimate_rate", r.estimate_rate);
  add("estimate_raw_inputs", r.estimate_raw_inputs);
  add("ci_lo", r.ci.lo);
  add("ci_hi", r.ci.hi);
  add("ci_median", r.ci.median);
  table.add_row({"ci_resamples", std::to_string(r.ci.resamples)});
  table.add_row({"ci_redrawn", std::to_string(r.ci.redrawn)});
  add("option1_z", r.option1.statistic);
  add("option1_p", r.option1.p);
  add("option2_z", r.option2.statistic);
  add("option2_p", r.option2.p);
  add("option3_z", r.option3.statistic);
  add("option3_p", r.option3.p);
  add("tipping_point", r.tipping_point);
  for (const auto& row : r.sweep) {
    const std::string suffix = "_delta0=" + fmt(row.delta0);
    add("delta0_st_from_rate" + suffix, row.delta0_st);
    add("option3_p" + suffix, row.p_option3);
    add("option3_p_rate_scale" + suffix, row.p_option3_rate);
    add("p2" + suffix, row.p2);
    add("p3" + suffix, row.p3);
  }
  const auto text = table.str();
  write_file(out_dir(c) / "example_prams.csv", text);
  out << text;
  return kExitOk;
}

int cmd_asymptotics_check(const RunConfig& c, std::ostream& out) {
  const std::vector<EstimatorConfig> fallback = {est::Mle{},  est::Pooled{}, est::TtPool{},
                                                 est::Ammse{}, est::Ebpp{},   est::Hdpp{}};
  const auto ests = parse_estimators(c.estimators, fallback);
  const auto hs = c.h_values.empty() ? std::vector<double>{0.0, 1.58, 5.06} : c.h_values;
  const std::size_t reps = c.replicates ? c.replicates : 100000;
  const double rn = std::sqrt(static_cast<double>(c.n));
  const LocalScenario base{0.0, static_cast<double>(c.n) / static_cast<double>(c.n + c.m), 0.0};

  CsvTable table({"estimator", "h", "draws", "ks_distance"});
  for (std::size_t k = 0; k < hs.size(); ++k) {
    SimPlan plan;
    plan.n = c.n;
    plan.m = c.m;
    plan.delta = hs[k] / rn;
    plan.replicates = reps;
    plan.seed = c.seed + k;
    plan.estimators = ests;
    const auto finite = simulate(plan, c.workers);
    LocalScenario sc = base;
    sc.h = hs[k];
    for (std::size_t j = 0; j < ests.size(); ++j) {
      const EmpiricalDist limit(limit_draws(ests[j], sc, reps, c.seed + 1000 + k * ests.size() + j, c.workers));
      const double ks = ks_distance(finite.at(label(ests[j])), limit);
      table.add_row({label(ests[j]), fmt(hs[k]), std::to_string(reps), fmt(ks)});
      out << label(ests[j]) << " h=" << fmt(hs[k]) << " ks=" << fmt(ks) << '\n';
    }
  }
  write_file(out_dir(c) / "asymptotics_check.csv", table.str());
  return kExitOk;
}

int dispatch(const RunConfig& c, std::ostream& out) {
  validate_run(c);
  if (c.subcommand == "estimate") return cmd_estimate(c, out);
  if (c.subcommand == "srmse-curve") return cmd_srmse_curve(c, out);
  if (c.subcommand == "bayes-risk-table") return cmd_bayes_risk_table(c, out);
  if (c.subcommand == "power") return cmd_power(c, out);
  if (c.subcommand == "densities") return cmd_densities(c, out);
  if (c.subcommand == "example-prams") return cmd_example_prams(c, out);
  return cmd_asymptotics_check(c, out);
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message) {
  json rec;
  rec["error"] = kind;
  rec["message"] = message;
  err << rec.dump() << '\n';
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["n"] = c.n;
  j["m"] = c.m;
  j["theta_hat"] = c.theta_hat;
  j["beta_hat"] = c.beta_hat;
  j["estimators"] = c.estimators;
  j["sqrt_n_delta_grid"] = c.sqrt_n_delta_grid;
  j["delta_grid"] = c.delta_grid;
  j["thetas"] = c.thetas;
  j["priors"] = c.priors;
  j["conventions"] = c.conventions;
  j["h_values"] = c.h_values;
  j["alpha"] = c.alpha;
  j["theta0"] = c.theta0;
  j["delta0"] = c.delta0;
  j["sens"] = c.sens;
  j["replicates"] = c.replicates;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["bootstrap_scheme"] = c.bootstrap_scheme;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["full_fidelity"] = c.full_fidelity;
  j["plot"] = c.plot;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

RunConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  const std::map<std::string, std::function<void(const json&)>> fields = {
      {"subcommand", [&](const json& v) { c.subcommand = v.get<std::string>(); }},
      {"n", [&](const json& v) { c.n = v.get<std::int64_t>(); }},
      {"m", [&](const json& v) { c.m = v.get<std::int64_t>(); }},
      {"theta_hat", [&](const json& v) { c.theta_hat = v.get<double>(); }},
      {"beta_hat", [&](const json& v) { c.beta_hat = v.get<double>(); }},
      {"estimators", [&](const json& v) { c.estimators = v.get<std::vector<std::string>>(); }},
      {"sqrt_n_delta_grid", [&](const json& v) { c.sqrt_n_delta_grid = v.get<std::vector<double>>(); }},
      {"delta_grid", [&](const json& v) { c.delta_grid = v.get<std::vector<double>>(); }},
      {"thetas", [&](const json& v) { c.thetas = v.get<std::vector<double>>(); }},
      {"priors", [&](const json& v) { c.priors = v.get<std::vector<std::string>>(); }},
      {"conventions", [&](const json& v) { c.conventions = v.get<std::vector<std::string>>(); }},
      {"h_values", [&](const json& v) { c.h_values = v.get<std::vector<double>>(); }},
      {"alpha", [&](const json& v) { c.alpha = v.get<double>(); }},
      {"theta0", [&](const json& v) { c.theta0 = v.get<double>(); }},
      {"delta0", [&](const json& v) { c.delta0 = v.get<double>(); }},
      {"sens", [&](const json& v) { c.sens = v.get<double>(); }},
      {"replicates", [&](const json& v) { c.replicates = v.get<std::size_t>(); }},
      {"bootstrap_resamples", [&](const json& v) { c.bootstrap_resamples = v.get<std::size_t>(); }},
      {"bootstrap_scheme", [&](const json& v) { c.bootstrap_scheme = v.get<std::string>(); }},
      {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"workers", [&](const json& v) { c.workers = v.get<unsigned>(); }},
      {"full_fidelity", [&](const json& v) { c.full_fidelity = v.get<bool>(); }},
      {"plot", [&](const json& v) { c.plot = v.get<bool>(); }},
      {"out_dir", [&](const json& v) { c.out_dir = v.get<std::string>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  return c;
}

ConflictPrior parse_prior(std::string_view text) {
  std::vector<std::string> parts;
  std::stringstream ss{std::string(text)};
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  auto num = [&](std::size_t i) {
    if (i >= parts.size()) throw ConfigError("prior '" + std::string(text) + "' is missing parameters");
    try {
      std::size_t used = 0;
      const double v = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("prior '" + std::string(text) + "': invalid number '" + parts[i] + "'");
    }
  };
  auto expect = [&](std::size_t count) {
    if (parts.size() != count) throw ConfigError("prior '" + std::string(text) + "' has the wrong number of parameters");
  };
  if (parts.empty()) throw ConfigError("empty prior");
  ConflictPrior p;
  const auto& kind = parts[0];
  if (kind == "normal") {
    expect(3);
    p = prior::Normal{num(1), num(2)};
  } else if (kind == "uniform") {
    expect(3);
    p = prior::Uniform{num(1), num(2)};
  } else if (kind == "laplace") {
    expect(3);
    p = prior::Laplace{num(1), num(2)};
  } else if (kind == "t") {
    expect(4);
    p = prior::LocationScaleT{static_cast<int>(num(1)), num(2), num(3)};
  } else if (kind == "point") {
    expect(2);
    p = prior::PointMass{num(1)};
  } else {
    throw ConfigError("unknown prior '" + std::string(text) + "'");
  }
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic information borrowing: estimators, risk, testing and simulation"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::int64_t> n, m;
  std::optional<double> theta_hat, beta_hat, alpha, theta0, delta0, sens;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> replicates, resamples;
  std::optional<std::string> out_path, scheme;
  std::vector<std::string> estimators;
  bool full_fidelity = false, no_plot = false, print_config = false;

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"estimate", "point estimates for one (theta_hat, n, beta_hat, m)"},
      {"srmse-curve", "finite-sample SRMSE against sqrt(n) delta"},
      {"bayes-risk-table", "prior-integrated SRMSE for each estimator and prior"},
      {"power", "critical values and power curves under each conflict convention"},
      {"densities", "simulated densities of sqrt(n)(T - theta) at several conflicts"},
      {"example-prams", "infant-mortality worked example: estimate, CI, p-values"},
      {"asymptotics-check", "KS distance between finite-sample and limit draws"},
  };
  for (const auto& name : kSubcommands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->fallthrough();
    subs[name] = sub;
  }
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--n", n, "current sample size");
  app.add_option("--m", m, "external sample size");
  app.add_option("--theta-hat", theta_hat, "current-data mean");
  app.add_option("--beta-hat", beta_hat, "external-data mean");
  app.add_option("--estimator", estimators, "estimator, e.g. ammse, ttpool:3.84, gdib:ebpp:0.5 (repeatable)");
  app.add_option("--alpha", alpha, "one-sided significance level");
  app.add_option("--theta0", theta0, "null value");
  app.add_option("--delta0", delta0, "conflict bound");
  app.add_option("--sens", sens, "sensitivity to conflict for the worked example");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "worker threads (0: all cores)");
  app.add_option("--replicates", replicates, "Monte Carlo replicates");
  app.add_option("--resamples", resamples, "bootstrap resamples");
  app.add_option("--bootstrap-scheme", scheme, "parametric or nonparametric");
  app.add_option("--out", out_path, std::string("output directory (default $") + kOutDirEnv + " or ./dib_out)");
  app.add_flag("--full-fidelity", full_fidelity, "use the full resample counts");
  app.add_flag("--no-plot", no_plot, "skip SVG output");
  app.add_flag("--print-config", print_config, "print the resolved configuration as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_record(err, "config", e.what());
    return kExitConfig;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream buf;
      buf << f.rdbuf();
      c = config_from_json(buf.str());
    }
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) {
        if (!c.subcommand.empty() && c.subcommand != name) {
          throw ConfigError("config subcommand '" + c.subcommand + "' conflicts with '" + name + "'");
        }
        c.subcommand = name;
      }
    }
    if (n) c.n = *n;
    if (m) c.m = *m;
    if (theta_hat) c.theta_hat = *theta_hat;
    if (beta_hat) c.beta_hat = *beta_hat;
    if (!estimators.empty()) c.estimators = estimators;
    if (alpha) c.alpha = *alpha;
    if (theta0) c.theta0 = *theta0;
    if (delta0) c.delta0 = *delta0;
    if (sens) c.sens = *sens;
    if (seed) c.seed = *seed;
    if (workers) c.workers = *workers;
    if (replicates) c.replicates = *replicates;
    if (resamples) c.bootstrap_resamples = *resamples;
    if (scheme) c.bootstrap_scheme = *scheme;
    if (out_path) c.out_dir = *out_path;
    if (full_fidelity) c.full_fidelity = true;
    if (no_plot) c.plot = false;
    validate_run(c);
    if (print_config) out << config_to_json(c) << '\n';
    return dispatch(c, out);
  } catch (const ConfigError& e) {
    error_record(err, "config", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    error_record(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    error_record(err, "config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    error_record(err, "numerical", e.what());
    return kExitNumerical;
  }
}

}  // namespace dib
