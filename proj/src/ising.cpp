#include "lsb/ising.hpp"

#include <cmath>

namespace lsb {

namespace {
inline int spin(int v) { return 2 * v - 1; }
}  // namespace

IsingModel::IsingModel(int n, double lambda, std::vector<double> alpha)
    : n_(n), lambda_(lambda), alpha_(std::move(alpha)) {
  if (n_ <= 0) throw InvalidInputError("lattice side must be positive");
  if (lambda_ < 0.0) throw InvalidInputError("lambda must be nonnegative");
  if (static_cast<int>(alpha_.size()) != n_ * n_)
    throw InvalidInputError("alpha must have n*n entries");
  for (double a : alpha_) {
    if (!std::isfinite(a)) throw InvalidInputError("alpha entries must be finite");
  }
}

double IsingModel::log_prob(const DiscreteState& x) const {
  require_valid_state(x);
  double field = 0.0;
  double coupling = 0.0;
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      const int i = r * n_ + c;
      const int s = spin(x[i]);
      field += alpha_[i] * s;
      if (c + 1 < n_) coupling += s * spin(x[i + 1]);
      if (r + 1 < n_) coupling += s * spin(x[i + n_]);
    }
  }
  return field + lambda_ * coupling;
}

double IsingModel::delta_log_prob(const DiscreteState& x, int site, int new_value) const {
  require_valid_state(x);
  if (site < 0 || site >= n_ * n_) throw InvalidInputError("site out of range");
  if (new_value < 0 || new_value >= 2) throw InvalidInputError("spin value out of range");
  if (new_value == x[site]) return 0.0;

  const int r = site / n_;
  const int c = site % n_;
  int nbr_sum = 0;
  if (r > 0) nbr_sum += spin(x[site - n_]);
  if (r + 1 < n_) nbr_sum += spin(x[site + n_]);
  if (c > 0) nbr_sum += spin(x[site - 1]);
  if (c + 1 < n_) nbr_sum += spin(x[site + 1]);

  // Flip of s at `site`: both the field and each incident coupling swing by -2s*(.)
  const int s = spin(x[site]);
  return -2.0 * s * (alpha_[site] + lambda_ * nbr_sum);
}

std::vector<double> generate_observation(const ObservationSpec& spec) {
  if (spec.sigma <= 0.0) throw InvalidInputError("sigma must be positive");
  std::vector<double> alpha(spec.ground_truth.size());
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.ground_truth.size(); ++i) {
    const int t = spec.ground_truth[i];
    if (t != -1 && t != 1) throw InvalidInputError("ground truth entries must be -1 or +1");
    const double y = spec.mu * t + spec.sigma * rng.normal();
    alpha[i] = y * spec.mu / (spec.sigma * spec.sigma);
  }
  return alpha;
}

std::vector<int> square_ground_truth(int n) {
  std::vector<int> truth(static_cast<std::size_t>(n) * n, -1);
  const int lo = n / 4;
  const int hi = lo + n / 2;
  for (int r = lo; r < hi; ++r)
    for (int c = lo; c < hi; ++c) truth[r * n + c] = 1;
  return truth;
}

}  // namespace lsb
