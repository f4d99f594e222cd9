#ifndef LSB_BALANCING_HPP
#define LSB_BALANCING_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "lsb/common.hpp"

namespace lsb {

// ---- fixed balancing functions ----------------------------------------------

// The four closed-form functions satisfying g(t) = t*g(1/t):
// t/(1+t), sqrt(t), min{1,t}, max{1,t}.
enum class FixedBalancingKind { Barker, Sqrt, MinOne, MaxOne };

inline constexpr std::array<FixedBalancingKind, 4> kFixedKinds = {
    FixedBalancingKind::Barker, FixedBalancingKind::Sqrt, FixedBalancingKind::MinOne,
    FixedBalancingKind::MaxOne};

const char* fixed_kind_name(FixedBalancingKind kind);

// log g(e^delta), evaluated entirely in log domain so |delta| in the hundreds
// cannot overflow. delta may be +-inf; NaN is rejected.
double eval_log_g_fixed(FixedBalancingKind kind, double delta);

// ---- evaluation interface ---------------------------------------------------

// One (parameter index, d log g / d parameter) pair of a sparse gradient.
struct GradEntry {
  int param;
  double value;
};

// log g at a log-ratio plus the dense parameter gradient.
struct BalancingEval {
  double log_g = 0.0;
  std::vector<double> grad;  // length = parameter count (empty for fixed g)
};

// Evaluation surface shared by the kernel and the adaptation loop. Evaluations
// are pure and safe to call concurrently on an immutable instance.
class BalancingFunction {
 public:
  virtual ~BalancingFunction() = default;

  virtual int param_count() const = 0;
  virtual double log_g(double delta) const = 0;

  // Appends d log g / d theta entries (sparse) and returns log g. The entry
  // set is empty whenever log g is not finite.
  virtual double log_g_grad(double delta, std::vector<GradEntry>& out) const = 0;

  // Smallest gap among the min/max selection points hit while evaluating at
  // delta; +inf when the function is smooth there. Finite-difference checks
  // skip points too close to a tie.
  virtual double tie_margin(double) const { return kPosInf; }
};

class FixedBalancing final : public BalancingFunction {
 public:
  explicit FixedBalancing(FixedBalancingKind kind) : kind_(kind) {}
  int param_count() const override { return 0; }
  double log_g(double delta) const override { return eval_log_g_fixed(kind_, delta); }
  double log_g_grad(double delta, std::vector<GradEntry>&) const override {
    return eval_log_g_fixed(kind_, delta);
  }
  FixedBalancingKind kind() const { return kind_; }

 private:
  FixedBalancingKind kind_;
};

// ---- LSB 1: softmax mixture of the four fixed functions ----------------------

// g(t) = sum_i w_i g_i(t) with w = softmax(theta); a convex combination of
// balancing functions is itself balancing, so this learns to select.
class Lsb1Params {
 public:
  static constexpr int kComponents = 4;

  Lsb1Params() { refresh(); }
  explicit Lsb1Params(const std::array<double, 4>& theta) : theta_(theta) { refresh(); }

  const std::array<double, 4>& theta() const { return theta_; }
  void set_theta(const std::array<double, 4>& theta);

  // softmax(theta): strictly positive, sums to 1.
  std::array<double, 4> weights() const;
  const std::array<double, 4>& log_weights() const { return log_w_; }

  std::uint64_t version() const { return version_; }

 private:
  void refresh();

  std::array<double, 4> theta_{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> log_w_{};
  std::uint64_t version_ = 0;
};

BalancingEval lsb1_eval(const Lsb1Params& params, double delta);

class Lsb1Balancing final : public BalancingFunction {
 public:
  explicit Lsb1Balancing(Lsb1Params params) : params_(std::move(params)) {}
  int param_count() const override { return Lsb1Params::kComponents; }
  double log_g(double delta) const override;
  double log_g_grad(double delta, std::vector<GradEntry>& out) const override;
  const Lsb1Params& params() const { return params_; }
  Lsb1Params& params() { return params_; }

 private:
  Lsb1Params params_;
};

// ---- LSB 2: constrained monotonic network ------------------------------------

// Min-max lattice of linear units: h(s) = min_k max_m (e^{a_km} s + b_km).
// The exponential reparametrization keeps every effective slope positive, so
// h is nondecreasing for any parameter setting.
class MonotonicNet {
 public:
  MonotonicNet(int blocks, int units_per_block);
  MonotonicNet(int blocks, int units_per_block, Rng& rng);  // a,b ~ U(-1,1)

  int blocks() const { return blocks_; }
  int units_per_block() const { return units_; }
  int param_count() const { return 2 * blocks_ * units_; }

  // Layout: unit u = block*units_per_block + m holds raw slope at 2u, bias at 2u+1.
  const std::vector<double>& params() const { return raw_; }
  double param(int i) const { return raw_[i]; }
  void set_param(int i, double value);
  void set_params(const std::vector<double>& raw);

  struct RawEval {
    double value;
    int unit;       // winning unit (block-major index)
    double margin;  // min gap at the min/max selection points
  };
  RawEval raw_output(double s) const;

  // d raw_output / d (a, b) of the winning unit; first attaining branch on ties.
  void raw_grad(double s, const RawEval& eval, double scale, std::vector<GradEntry>& out) const;

  std::uint64_t version() const { return version_; }

 private:
  void refresh();

  int blocks_;
  int units_;
  std::vector<double> raw_;     // [a_0, b_0, a_1, b_1, ...]
  std::vector<double> slopes_;  // cached e^{a_u}
  std::uint64_t version_ = 0;
};

// g_theta(t) = min{ h(t), t*h(1/t) } evaluated at s = log t (inputs clamped to
// [-clamp, clamp]); h outputs pass through softplus before the log so g stays
// positive. Balancing holds by construction for any parameters.
struct Lsb2EvalOptions {
  double input_clamp = 30.0;
};

BalancingEval lsb2_eval(const MonotonicNet& net, double delta, const Lsb2EvalOptions& = {});

class Lsb2Balancing final : public BalancingFunction {
 public:
  explicit Lsb2Balancing(MonotonicNet net, Lsb2EvalOptions opts = {})
      : net_(std::move(net)), opts_(opts) {}
  int param_count() const override { return net_.param_count(); }
  double log_g(double delta) const override;
  double log_g_grad(double delta, std::vector<GradEntry>& out) const override;
  double tie_margin(double delta) const override;
  const MonotonicNet& net() const { return net_; }
  MonotonicNet& net() { return net_; }
  const Lsb2EvalOptions& options() const { return opts_; }

 private:
  MonotonicNet net_;
  Lsb2EvalOptions opts_;
};

// Finite-difference penalty on the raw network discouraging decreasing
// stretches of t*h(1/t); zero wherever that map is locally increasing.
struct PenaltyResult {
  double value = 0.0;
  std::vector<GradEntry> grad;
};

PenaltyResult monotonicity_penalty(const MonotonicNet& net, double t, double eps = 1e-3);

// ---- capacity probe ----------------------------------------------------------

struct FitResult {
  MonotonicNet net;
  std::vector<double> loss;  // per-step mean squared error
};

// SGD on E_{t~U(0,2]}[(g_theta(t) - g_target(t))^2]; used to probe how well the
// network can match a closed-form balancing function.
FitResult fit_net_l2(const MonotonicNet& net, FixedBalancingKind target, int steps, double lr,
                     Rng& rng, int batch = 64);

// ---- tagged parameter container + text checkpoint format ---------------------

using BalancingSpec = std::variant<FixedBalancingKind, Lsb1Params, MonotonicNet>;

std::unique_ptr<BalancingFunction> make_balancing(const BalancingSpec& spec);

// One header line (kind + dimensions), then one parameter per line in decimal.
void save_balancing(std::ostream& out, const BalancingSpec& spec);
void save_balancing(const std::string& path, const BalancingSpec& spec);
BalancingSpec load_balancing(std::istream& in);
BalancingSpec load_balancing_file(const std::string& path);

}  // namespace lsb

#endif  // LSB_BALANCING_HPP
