#include "lsb/balancing.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lsb {

namespace {
// Raw slope parameters are kept in a range where e^a stays well conditioned.
constexpr double kMaxRawSlope = 15.0;
}  // namespace

const char* fixed_kind_name(FixedBalancingKind kind) {
  switch (kind) {
    case FixedBalancingKind::Barker: return "barker";
    case FixedBalancingKind::Sqrt: return "sqrt";
    case FixedBalancingKind::MinOne: return "min_one";
    case FixedBalancingKind::MaxOne: return "max_one";
  }
  return "?";
}

double eval_log_g_fixed(FixedBalancingKind kind, double delta) {
  if (std::isnan(delta)) throw InvalidInputError("log-ratio is NaN");
  switch (kind) {
    case FixedBalancingKind::Barker:
      // log t/(1+t) = -log(1 + e^-delta)
      return delta == kPosInf ? 0.0 : -softplus(-delta);
    case FixedBalancingKind::Sqrt:
      return 0.5 * delta;
    case FixedBalancingKind::MinOne:
      return std::min(0.0, delta);
    case FixedBalancingKind::MaxOne:
      return std::max(0.0, delta);
  }
  return 0.0;
}

// ---- LSB 1 -------------------------------------------------------------------

void Lsb1Params::set_theta(const std::array<double, 4>& theta) {
  theta_ = theta;
  refresh();
  ++version_;
}

void Lsb1Params::refresh() {
  double lse = log_sum_exp(std::span<const double>(theta_.data(), theta_.size()));
  for (int i = 0; i < 4; ++i) log_w_[i] = theta_[i] - lse;
}

std::array<double, 4> Lsb1Params::weights() const {
  std::array<double, 4> w;
  for (int i = 0; i < 4; ++i) w[i] = std::exp(log_w_[i]);
  return w;
}

BalancingEval lsb1_eval(const Lsb1Params& params, double delta) {
  BalancingEval eval;
  eval.grad.assign(4, 0.0);
  Lsb1Balancing b(params);
  std::vector<GradEntry> entries;
  eval.log_g = b.log_g_grad(delta, entries);
  for (const GradEntry& e : entries) eval.grad[e.param] += e.value;
  return eval;
}

double Lsb1Balancing::log_g(double delta) const {
  std::array<double, 4> m;
  for (int i = 0; i < 4; ++i)
    m[i] = params_.log_weights()[i] + eval_log_g_fixed(kFixedKinds[i], delta);
  return log_sum_exp(std::span<const double>(m.data(), m.size()));
}

double Lsb1Balancing::log_g_grad(double delta, std::vector<GradEntry>& out) const {
  std::array<double, 4> m;
  for (int i = 0; i < 4; ++i)
    m[i] = params_.log_weights()[i] + eval_log_g_fixed(kFixedKinds[i], delta);
  double lse = log_sum_exp(std::span<const double>(m.data(), m.size()));
  if (!std::isfinite(lse)) return lse;
  // d log g / d theta_k = p_k - w_k with p = softmax of the mixture terms.
  for (int k = 0; k < 4; ++k) {
    double p_k = std::exp(m[k] - lse);
    double w_k = std::exp(params_.log_weights()[k]);
    out.push_back({k, p_k - w_k});
  }
  return lse;
}

// ---- monotonic network ---------------------------------------------------------

MonotonicNet::MonotonicNet(int blocks, int units_per_block)
    : blocks_(blocks), units_(units_per_block) {
  if (blocks_ < 1 || units_ < 1) throw InvalidInputError("network needs >= 1 block and unit");
  raw_.assign(static_cast<std::size_t>(param_count()), 0.0);
  refresh();
}

MonotonicNet::MonotonicNet(int blocks, int units_per_block, Rng& rng)
    : MonotonicNet(blocks, units_per_block) {
  for (double& p : raw_) p = rng.uniform(-1.0, 1.0);
  refresh();
}

void MonotonicNet::set_param(int i, double value) {
  raw_[i] = (i % 2 == 0) ? std::clamp(value, -kMaxRawSlope, kMaxRawSlope) : value;
  if (i % 2 == 0) slopes_[i / 2] = std::exp(raw_[i]);
  ++version_;
}

void MonotonicNet::set_params(const std::vector<double>& raw) {
  if (raw.size() != raw_.size()) throw InvalidInputError("parameter count mismatch");
  raw_ = raw;
  for (std::size_t u = 0; u < raw_.size() / 2; ++u)
    raw_[2 * u] = std::clamp(raw_[2 * u], -kMaxRawSlope, kMaxRawSlope);
  refresh();
  ++version_;
}

void MonotonicNet::refresh() {
  slopes_.resize(raw_.size() / 2);
  for (std::size_t u = 0; u < slopes_.size(); ++u) slopes_[u] = std::exp(raw_[2 * u]);
}

MonotonicNet::RawEval MonotonicNet::raw_output(double s) const {
  double best_min = kPosInf;
  double second_min = kPosInf;
  int best_unit = 0;
  double unit_margin = kPosInf;
  int u = 0;
  for (int k = 0; k < blocks_; ++k) {
    double best_max = kNegInf;
    double second_max = kNegInf;
    int best_in_block = 0;
    for (int m = 0; m < units_; ++m, ++u) {
      double v = slopes_[u] * s + raw_[2 * u + 1];
      if (v > best_max) {
        second_max = best_max;
        best_max = v;
        best_in_block = u;
      } else if (v > second_max) {
        second_max = v;
      }
    }
    if (best_max < best_min) {
      second_min = best_min;
      best_min = best_max;
      best_unit = best_in_block;
      unit_margin = units_ > 1 ? best_max - second_max : kPosInf;
    } else if (best_max < second_min) {
      second_min = best_max;
    }
  }
  double margin = std::min(unit_margin, blocks_ > 1 ? second_min - best_min : kPosInf);
  return {best_min, best_unit, margin};
}

void MonotonicNet::raw_grad(double s, const RawEval& eval, double scale,
                            std::vector<GradEntry>& out) const {
  // d(e^a s + b)/da = e^a s, d/db = 1, on the winning unit only.
  out.push_back({2 * eval.unit, scale * slopes_[eval.unit] * s});
  out.push_back({2 * eval.unit + 1, scale});
}

// ---- LSB 2 eval -----------------------------------------------------------------

namespace {

struct Lsb2Pieces {
  double log_g;
  int branch;  // 0: h(t) arm, 1: t*h(1/t) arm
  double s_selected;
  MonotonicNet::RawEval raw_selected;
  double raw_value_selected;
  double margin;
};

Lsb2Pieces lsb2_pieces(const MonotonicNet& net, double delta, const Lsb2EvalOptions& opts) {
  if (std::isnan(delta)) throw InvalidInputError("log-ratio is NaN");
  const double d = opts.input_clamp;
  const double s1 = std::clamp(delta, -d, d);
  const double s2 = std::clamp(-delta, -d, d);
  auto r1 = net.raw_output(s1);
  auto r2 = net.raw_output(s2);
  // log of: min{ softplus(h(log t)), t * softplus(h(-log t)) }. The t factor
  // keeps the true delta, so the balancing identity is exact even when the
  // network inputs are clamped.
  double arg1 = log_softplus(r1.value);
  double arg2 = delta + log_softplus(r2.value);
  Lsb2Pieces p;
  if (arg1 <= arg2) {
    p = {arg1, 0, s1, r1, r1.value, 0.0};
  } else {
    p = {arg2, 1, s2, r2, r2.value, 0.0};
  }
  double branch_margin = std::isfinite(arg1) && std::isfinite(arg2) ? std::abs(arg1 - arg2) : kPosInf;
  p.margin = std::min({branch_margin, r1.margin, r2.margin});
  return p;
}

}  // namespace

BalancingEval lsb2_eval(const MonotonicNet& net, double delta, const Lsb2EvalOptions& opts) {
  BalancingEval eval;
  eval.grad.assign(net.param_count(), 0.0);
  Lsb2Balancing b(net, opts);
  std::vector<GradEntry> entries;
  eval.log_g = b.log_g_grad(delta, entries);
  for (const GradEntry& e : entries) eval.grad[e.param] += e.value;
  return eval;
}

double Lsb2Balancing::log_g(double delta) const {
  return lsb2_pieces(net_, delta, opts_).log_g;
}

double Lsb2Balancing::log_g_grad(double delta, std::vector<GradEntry>& out) const {
  Lsb2Pieces p = lsb2_pieces(net_, delta, opts_);
  if (!std::isfinite(p.log_g)) return p.log_g;
  double scale = d_log_softplus(p.raw_value_selected);
  net_.raw_grad(p.s_selected, p.raw_selected, scale, out);
  return p.log_g;
}

double Lsb2Balancing::tie_margin(double delta) const {
  return lsb2_pieces(net_, delta, opts_).margin;
}

// ---- monotonicity penalty --------------------------------------------------------

PenaltyResult monotonicity_penalty(const MonotonicNet& net, double t, double eps) {
  if (!(t > 0.0)) throw InvalidInputError("penalty point t must be positive");
  if (!(eps > 0.0)) throw InvalidInputError("penalty eps must be positive");
  // Negated finite difference of f(t) = t*h(1/t); positive where f decreases.
  const double s_a = std::clamp(-std::log(t), -30.0, 30.0);
  const double s_b = std::clamp(-std::log(t + eps), -30.0, 30.0);
  auto r_a = net.raw_output(s_a);
  auto r_b = net.raw_output(s_b);
  double diff = (t * r_a.value - (t + eps) * r_b.value) / eps;
  PenaltyResult res;
  if (diff <= 0.0) return res;  // max{., 0}: inactive branch, zero subgradient
  res.value = diff;
  net.raw_grad(s_a, r_a, t / eps, res.grad);
  net.raw_grad(s_b, r_b, -(t + eps) / eps, res.grad);
  return res;
}

// ---- capacity probe ---------------------------------------------------------------

FitResult fit_net_l2(const MonotonicNet& net, FixedBalancingKind target, int steps, double lr,
                     Rng& rng, int batch) {
  if (steps <= 0) throw InvalidInputError("steps must be positive");
  FitResult result{net, {}};
  result.loss.reserve(steps);
  std::vector<double> grad(net.param_count());
  std::vector<GradEntry> entries;
  Lsb2EvalOptions opts;
  for (int step = 0; step < steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    Lsb2Balancing b(result.net, opts);
    for (int i = 0; i < batch; ++i) {
      double t = 2.0 * (1.0 - rng.uniform01());  // (0, 2]
      double delta = std::log(t);
      entries.clear();
      double log_g = b.log_g_grad(delta, entries);
      double g = std::exp(log_g);
      double g_target = std::exp(eval_log_g_fixed(target, delta));
      double resid = g - g_target;
      loss += resid * resid;
      // d/dp (g - g*)^2 = 2 (g - g*) g d log g/dp
      for (const GradEntry& e : entries) grad[e.param] += 2.0 * resid * g * e.value;
    }
    loss /= batch;
    result.loss.push_back(loss);
    std::vector<double> params = result.net.params();
    for (int p = 0; p < result.net.param_count(); ++p) params[p] -= lr * grad[p] / batch;
    result.net.set_params(params);
  }
  return result;
}

// ---- checkpoint format -------------------------------------------------------------

std::unique_ptr<BalancingFunction> make_balancing(const BalancingSpec& spec) {
  if (const auto* kind = std::get_if<FixedBalancingKind>(&spec))
    return std::make_unique<FixedBalancing>(*kind);
  if (const auto* lsb1 = std::get_if<Lsb1Params>(&spec))
    return std::make_unique<Lsb1Balancing>(*lsb1);
  return std::make_unique<Lsb2Balancing>(std::get<MonotonicNet>(spec));
}

namespace {
void write_value(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf << "\n";
}
}  // namespace

void save_balancing(std::ostream& out, const BalancingSpec& spec) {
  if (const auto* kind = std::get_if<FixedBalancingKind>(&spec)) {
    out << "fixed " << fixed_kind_name(*kind) << "\n";
    return;
  }
  if (const auto* lsb1 = std::get_if<Lsb1Params>(&spec)) {
    out << "lsb1 " << Lsb1Params::kComponents << "\n";
    for (double v : lsb1->theta()) write_value(out, v);
    return;
  }
  const auto& net = std::get<MonotonicNet>(spec);
  out << "lsb2 " << net.blocks() << " " << net.units_per_block() << "\n";
  for (double v : net.params()) write_value(out, v);
}

void save_balancing(const std::string& path, const BalancingSpec& spec) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  save_balancing(out, spec);
}

BalancingSpec load_balancing(std::istream& in) {
  std::string kind;
  if (!(in >> kind)) throw InvalidInputError("empty parameter file");
  if (kind == "fixed") {
    std::string name;
    in >> name;
    for (FixedBalancingKind k : kFixedKinds) {
      if (name == fixed_kind_name(k)) return k;
    }
    throw InvalidInputError("unknown fixed balancing function: " + name);
  }
  if (kind == "lsb1") {
    int n = 0;
    in >> n;
    if (n != Lsb1Params::kComponents)
      throw InvalidInputError("lsb1 checkpoint must have 4 components");
    std::array<double, 4> theta;
    for (double& v : theta) {
      if (!(in >> v)) throw InvalidInputError("truncated lsb1 checkpoint");
    }
    return Lsb1Params(theta);
  }
  if (kind == "lsb2") {
    int blocks = 0, units = 0;
    if (!(in >> blocks >> units) || blocks < 1 || units < 1)
      throw InvalidInputError("malformed lsb2 checkpoint header");
    MonotonicNet net(blocks, units);
    std::vector<double> raw(net.param_count());
    for (double& v : raw) {
      if (!(in >> v)) throw InvalidInputError("truncated lsb2 checkpoint");
    }
    net.set_params(raw);
    return net;
  }
  throw InvalidInputError("unknown parameter kind: " + kind);
}

BalancingSpec load_balancing_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open parameter file: " + path);
  return load_balancing(in);
}

}  // namespace lsb
