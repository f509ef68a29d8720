#include "dib/prams.hpp"

#include "dib/estimators.hpp"

namespace dib {

PramsReport run_prams(const PramsOptions& opts) {
  PramsReport r;
  r.ingest = from_raw_binomial(opts.current, opts.external);
  const auto st = r.ingest.standardized();
  const double sd_current = r.ingest.current.sd;
  const double sd_external = r.ingest.external.sd;
  // Under theta = theta0 a rate-scale conflict d maps to
  // (theta0 + d)/sd_external - theta0/sd_current on the standardized scale.
  auto to_st = [&](double d) { return (opts.theta0 + d) / sd_external - opts.theta0 / sd_current; };

  r.theta0_st = opts.theta0 / sd_current;
  r.estimate_st = est_ammse_s(st, opts.sens).theta_est;
  r.estimate_rate = r.estimate_st * sd_current;
  r.estimate_raw_inputs = est_ammse_s(r.ingest.raw, opts.sens).theta_est;
  r.ci = bootstrap_ci(opts.current, opts.external, opts.sens, opts.resamples, opts.level, opts.seed,
                      opts.scheme, opts.workers);

  r.option1 = pvalue(PValueOption::MleAllDelta, st, r.theta0_st, 0.0, opts.sens);
  r.option2 = pvalue(PValueOption::PooledDeltaZero, st, r.theta0_st, 0.0, opts.sens);
  r.option3 = pvalue(PValueOption::DibDeltaBounded, st, r.theta0_st, opts.delta0, opts.sens, opts.mc_draws,
                     opts.seed, opts.workers);
  r.tipping_point = tipping_point(st, r.theta0_st, opts.sens, opts.target_p);

  for (double d : opts.delta0_sweep) {
    PramsDeltaRow row;
    row.delta0 = d;
    row.delta0_st = to_st(d);
    row.p_option3 =
        pvalue(PValueOption::DibDeltaBounded, st, r.theta0_st, d, opts.sens, opts.mc_draws, opts.seed, opts.workers)
            .p;
    row.p_option3_rate = pvalue(PValueOption::DibDeltaBounded, st, r.theta0_st, row.delta0_st, opts.sens,
                                opts.mc_draws, opts.seed, opts.workers)
                             .p;
    const auto pp = p2_p3(st, d, r.theta0_st);
    row.p2 = pp.p2;
    row.p3 = pp.p3;
    r.sweep.push_back(row);
  }
  return r;
}

}  // namespace dib
