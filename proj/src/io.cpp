#include "lsb/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lsb {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string chain_trace_csv(const ChainTrace& trace) {
  std::ostringstream out;
  out << "iter,logp,accepted\n";
  for (std::size_t i = 0; i < trace.logp.size(); ++i) {
    const int accepted = i == 0 ? 0 : trace.accepted[i - 1];
    out << i << ',' << format_double(trace.logp[i]) << ',' << accepted << '\n';
  }
  return out.str();
}

std::string train_trace_csv(const std::vector<TrainTraceRow>& trace) {
  std::ostringstream out;
  out << "iter,J_hat,mean_logp,skipped\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << ',' << format_double(trace[i].j_hat) << ','
        << format_double(trace[i].mean_logp) << ',' << trace[i].skipped << '\n';
  }
  return out.str();
}

std::string acf_csv(const AcfResult& acf) {
  std::ostringstream out;
  out << "lag,rho\n";
  for (std::size_t k = 0; k < acf.rho.size(); ++k)
    out << k << ',' << format_double(acf.rho[k]) << '\n';
  return out.str();
}

std::string ess_csv(const EssResult& ess) {
  std::ostringstream out;
  out << "ess_raw,ess_per_1000,tau,trunc_lag\n";
  out << format_double(ess.ess) << ',' << format_double(ess.ess_per) << ','
      << format_double(ess.tau) << ',' << ess.trunc_lag << '\n';
  return out.str();
}

std::string burnin_csv(const std::vector<double>& mean_logp) {
  std::ostringstream out;
  out << "iter,mean_logp\n";
  for (std::size_t i = 0; i < mean_logp.size(); ++i)
    out << i << ',' << format_double(mean_logp[i]) << '\n';
  return out.str();
}

}  // namespace lsb
