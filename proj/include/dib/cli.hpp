#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dib/risk.hpp"

namespace dib {

/// Invalid configuration or command line; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "DIB_OUT_DIR";

/// Declarative run description. Empty lists and zero counts select the
/// subcommand's defaults.
struct RunConfig {
  std::string subcommand;
  std::int64_t n = 1000;
  std::int64_t m = 100000;
  double theta_hat = 0.0;
  double beta_hat = 0.0;
  std::vector<std::string> estimators;
  std::vector<double> sqrt_n_delta_grid;
  std::vector<double> delta_grid;
  std::vector<double> thetas;
  std::vector<std::string> priors;
  std::vector<std::string> conventions;
  std::vector<double> h_values;
  double alpha = 0.025;
  double theta0 = 0.0;
  double delta0 = 0.0636;
  double sens = 0.4;
  std::size_t replicates = 0;
  std::size_t bootstrap_resamples = 0;
  std::string bootstrap_scheme = "parametric";
  std::uint64_t seed = 20240501;
  unsigned workers = 1;
  bool full_fidelity = false;
  bool plot = true;
  std::string out_dir;

  bool operator==(const RunConfig&) const = default;
};

std::string config_to_json(const RunConfig& c);
/// Throws ConfigError on malformed JSON, wrong types or unknown keys.
RunConfig config_from_json(std::string_view text);

/// "normal:mu:var", "uniform:a:b", "laplace:loc:scale", "t:v:loc:scale",
/// "point:delta".
ConflictPrior parse_prior(std::string_view text);

/// Entry point of the command line tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dib
