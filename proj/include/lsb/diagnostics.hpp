#ifndef LSB_DIAGNOSTICS_HPP
#define LSB_DIAGNOSTICS_HPP

#include <vector>

#include "lsb/common.hpp"

namespace lsb {

// Autocorrelations of a scalar trace: rho[0..max_lag], rho[0] = 1.
struct AcfResult {
  std::vector<double> rho;
};

// Biased-normalized sample autocovariance divided by the lag-0 autocovariance.
AcfResult autocorrelation(const std::vector<double>& trace, int max_lag);

// ESS = L / tau with tau = 1 + 2 sum_k rho_k, truncated before the first
// nonpositive even-pair sum (initial positive sequence); tau floored at 1 so
// ess never exceeds the trace length.
struct EssResult {
  double ess = 0.0;       // raw iid-equivalent count
  double ess_per = 0.0;   // ess normalized per `normalize_per` samples
  double tau = 1.0;       // integrated autocorrelation time
  int trunc_lag = 0;      // last lag included in the sum
};

// max_lag < 0 means automatic (trace length - 1); max_lag = 0 asserts an
// uncorrelated trace and yields ess = L.
EssResult effective_sample_size(const std::vector<double>& trace, int normalize_per = 1000,
                                int max_lag = -1);

}  // namespace lsb

#endif  // LSB_DIAGNOSTICS_HPP
