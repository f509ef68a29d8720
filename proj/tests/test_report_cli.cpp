#include "dib/cli.hpp"
#include "dib/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace dib {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dib_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int run_args(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "dib");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

TEST(Csv, Escaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("gdib(ebpp,0.5)"), "\"gdib(ebpp,0.5)\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_escape("a\nb"), "\"a\nb\"");
  CsvTable t({"a", "b"});
  t.add_row({"1", "x,y"});
  EXPECT_EQ(t.str(), "a,b\n1,\"x,y\"\n");
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
}

TEST(Svg, Deterministic) {
  const std::vector<PlotSeries> s = {{"a", {0, 1, 2}, {0, 1, 4}}, {"b<&>", {0, 2}, {1, 1}}};
  PlotStyle style;
  style.title = "t";
  style.vline = 1.0;
  const auto a = render_svg(s, style);
  EXPECT_EQ(a, render_svg(s, style));
  EXPECT_EQ(a.rfind("<svg", 0) == 0 || a.rfind("<?xml", 0) == 0, true);
  EXPECT_NE(a.find("b&lt;&amp;&gt;"), std::string::npos);
  EXPECT_EQ(a.find("b<&>"), std::string::npos);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.subcommand = "power";
  c.estimators = {"ammse", "gdib:ebpp:0.5"};
  c.thetas = {0.0, 0.03};
  c.priors = {"normal:0:0.001"};
  c.conventions = {"delta_zero"};
  c.sens = 0.25;
  c.seed = 99;
  c.workers = 3;
  c.full_fidelity = true;
  c.plot = false;
  c.out_dir = "x";
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_EQ(config_from_json(config_to_json(RunConfig{})), RunConfig{});
}

TEST(Config, RejectsBadJson) {
  EXPECT_THROW(config_from_json("{\"bogus\": 1}"), ConfigError);
  EXPECT_THROW(config_from_json("{\"n\": \"ten\"}"), ConfigError);
  EXPECT_THROW(config_from_json("[1,2"), ConfigError);
}

TEST(Prior, Parsing) {
  EXPECT_EQ(label(parse_prior("normal:0:0.001")), label(ConflictPrior{prior::Normal{0.0, 0.001}}));
  EXPECT_NO_THROW(parse_prior("t:3:0:0.03"));
  EXPECT_NO_THROW(parse_prior("point:0.1"));
  EXPECT_THROW(parse_prior("normal:0"), std::invalid_argument);
  EXPECT_THROW(parse_prior("cauchy:0:1"), std::invalid_argument);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  std::string err;
  EXPECT_EQ(run_args({"estimate", "--estimator", "nope", "--out", dir.string()}, nullptr, &err), kExitConfig);
  EXPECT_NE(err.find("\"config\""), std::string::npos);
  EXPECT_EQ(run_args({"estimate", "--unknown-flag"}), kExitConfig);
  EXPECT_EQ(run_args({"estimate", "--n", "0", "--out", dir.string()}), kExitConfig);
  const auto cfg = dir / "bad.json";
  write_file(cfg, "{\"subcommand\": \"estimate\", \"typo\": 1}");
  EXPECT_EQ(run_args({"--config", cfg.string()}), kExitConfig);
  EXPECT_EQ(run_args({"--n", "10"}), kExitConfig);
}

TEST(Cli, EstimateWritesCsv) {
  const auto dir = scratch("estimate");
  std::string out;
  ASSERT_EQ(run_args({"estimate", "--n", "100", "--m", "400", "--theta-hat", "0", "--beta-hat", "1", "--estimator",
                      "ammse", "--estimator", "mle", "--out", dir.string()},
                     &out),
            kExitOk);
  const auto csv = slurp(dir / "estimate.csv");
  EXPECT_NE(csv.find("ammse,0.009876543"), std::string::npos) << csv;
  EXPECT_NE(csv.find("mle,0"), std::string::npos);
}

TEST(Cli, PrintConfigRoundTrips) {
  const auto dir = scratch("print");
  std::string out;
  ASSERT_EQ(run_args({"estimate", "--n", "50", "--m", "60", "--sens", "0.7", "--print-config", "--out", dir.string()},
                     &out),
            kExitOk);
  const auto json = out.substr(0, out.find("\n}") + 2);
  const auto c = config_from_json(json);
  EXPECT_EQ(c.subcommand, "estimate");
  EXPECT_EQ(c.n, 50);
  EXPECT_EQ(c.sens, 0.7);
  // running from the printed config reproduces the same files
  const auto cfg = dir / "cfg.json";
  write_file(cfg, json);
  const auto first = slurp(dir / "estimate.csv");
  fs::remove(dir / "estimate.csv");
  ASSERT_EQ(run_args({"--config", cfg.string()}), kExitOk);
  EXPECT_EQ(slurp(dir / "estimate.csv"), first);
}

TEST(Cli, OutputsIndependentOfWorkers) {
  const auto a = scratch("workers_a"), b = scratch("workers_b");
  const std::vector<std::string> common = {"densities", "--n", "100", "--m", "1000", "--replicates", "3000",
                                           "--estimator", "ammse", "--estimator", "ttpool"};
  auto args_a = common, args_b = common;
  args_a.insert(args_a.end(), {"--workers", "1", "--out", a.string()});
  args_b.insert(args_b.end(), {"--workers", "6", "--out", b.string()});
  ASSERT_EQ(run_args(args_a), kExitOk);
  ASSERT_EQ(run_args(args_b), kExitOk);
  EXPECT_EQ(slurp(a / "densities.csv"), slurp(b / "densities.csv"));
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() == ".svg") EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename()));
  }
}

}  // namespace
}  // namespace dib
