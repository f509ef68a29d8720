#pragma once

#include <cstdint>
#include <vector>

#include "dib/montecarlo.hpp"
#include "dib/summaries.hpp"
#include "dib/testing.hpp"

namespace dib {

/// Inputs of the infant-mortality worked example: 37 deaths in 94 births
/// locally, a national rate of 38.4% over 20000 births.
struct PramsOptions {
  BinomialRaw current{37, 94};
  BinomialRaw external{7680, 20000};
  double sens = 0.4;
  double theta0 = 1.0 / 3.0;  // rate scale
  double delta0 = 0.05;
  std::vector<double> delta0_sweep{0.01, 0.05, 0.087};
  double target_p = 0.05;
  std::size_t resamples = 100000;
  double level = 0.95;
  BootstrapScheme scheme = BootstrapScheme::Parametric;
  std::size_t mc_draws = 0;  // 0: exact p-values by quadrature
  std::uint64_t seed = 20240501;
  unsigned workers = 1;
};

struct PramsDeltaRow {
  double delta0 = 0.0;            // as given
  double delta0_st = 0.0;         // the same conflict read on the rate scale, standardized
  double p_option3 = 0.0;         // delta0 on the standardized scale
  double p_option3_rate = 0.0;    // delta0 on the rate scale
  double p2 = 0.0;
  double p3 = 0.0;
};

struct PramsReport {
  BinomialIngest ingest;
  double theta0_st = 0.0;
  double estimate_st = 0.0;
  double estimate_rate = 0.0;        // estimate_st * SD of the current sample
  double estimate_raw_inputs = 0.0;  // same rule applied to unstandardized rates
  BootstrapResult ci;
  PValue option1;
  PValue option2;
  PValue option3;
  double tipping_point = 0.0;
  std::vector<PramsDeltaRow> sweep;
};

PramsReport run_prams(const PramsOptions& opts);

}  // namespace dib
