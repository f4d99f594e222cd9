#include "lsb/diagnostics.hpp"

#include <cmath>

namespace lsb {

namespace {

double trace_mean(const std::vector<double>& trace) {
  double m = 0.0;
  for (double x : trace) m += x;
  return m / static_cast<double>(trace.size());
}

// Biased (1/L) autocovariance at one lag around a precomputed mean.
double autocov(const std::vector<double>& trace, double mean, int lag) {
  const std::size_t n = trace.size();
  double c = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) c += (trace[t] - mean) * (trace[t + lag] - mean);
  return c / static_cast<double>(n);
}

}  // namespace

AcfResult autocorrelation(const std::vector<double>& trace, int max_lag) {
  const int n = static_cast<int>(trace.size());
  if (max_lag < 1) throw InvalidInputError("max_lag must be >= 1");
  if (n <= max_lag) throw InvalidInputError("trace must be longer than max_lag");
  const double mean = trace_mean(trace);
  const double c0 = autocov(trace, mean, 0);
  if (c0 <= 0.0) throw InvalidInputError("trace has zero variance");
  AcfResult result;
  result.rho.resize(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) result.rho[k] = autocov(trace, mean, k) / c0;
  return result;
}

EssResult effective_sample_size(const std::vector<double>& trace, int normalize_per, int max_lag) {
  const int n = static_cast<int>(trace.size());
  if (n < 2) throw InvalidInputError("trace too short");
  const double mean = trace_mean(trace);
  const double c0 = autocov(trace, mean, 0);
  if (c0 <= 0.0) throw InvalidInputError("trace has zero variance");
  if (max_lag < 0) max_lag = n - 1;

  // Initial positive sequence: accumulate pair sums rho_{2m} + rho_{2m+1}
  // on demand, stopping before the first nonpositive pair.
  double rho_sum = 0.0;  // sum of rho_1..rho_trunc
  int trunc = 0;
  for (int m = 0;; ++m) {
    const int k0 = 2 * m;
    const int k1 = 2 * m + 1;
    if (k1 > max_lag) break;
    const double rho0 = k0 == 0 ? 1.0 : autocov(trace, mean, k0) / c0;
    const double rho1 = autocov(trace, mean, k1) / c0;
    if (rho0 + rho1 <= 0.0) break;
    if (k0 > 0) rho_sum += rho0;
    rho_sum += rho1;
    trunc = k1;
  }

  EssResult result;
  result.tau = std::max(1.0, 1.0 + 2.0 * rho_sum);
  result.trunc_lag = trunc;
  result.ess = static_cast<double>(n) / result.tau;
  result.ess_per = result.ess / static_cast<double>(n) * static_cast<double>(normalize_per);
  return result;
}

}  // namespace lsb
