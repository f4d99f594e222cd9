#ifndef LSB_IO_HPP
#define LSB_IO_HPP

#include <string>
#include <vector>

#include "lsb/adapt.hpp"
#include "lsb/diagnostics.hpp"
#include "lsb/kernel.hpp"

namespace lsb {

// Writes content to path via a temp file + rename, so files are either fully
// written or absent. Parent directories are created as needed.
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);  // shortest round-trippable decimal

// CSV emitters: `,` separators, \n line endings, header row first.
std::string chain_trace_csv(const ChainTrace& trace);              // iter,logp,accepted
std::string train_trace_csv(const std::vector<TrainTraceRow>&);    // iter,J_hat,mean_logp,skipped
std::string acf_csv(const AcfResult& acf);                         // lag,rho
std::string ess_csv(const EssResult& ess);  // ess_raw,ess_per_1000,tau,trunc_lag
std::string burnin_csv(const std::vector<double>& mean_logp);      // iter,mean_logp

}  // namespace lsb

#endif  // LSB_IO_HPP
