#ifndef LSB_ISING_HPP
#define LSB_ISING_HPP

#include <cstdint>
#include <vector>

#include "lsb/target.hpp"

namespace lsb {

// 2D Ising posterior on an n x n square lattice with 4-neighbor couplings:
//   log p~(x) = sum_i alpha_i x_i + lambda * sum_{(i,j) in E} x_i x_j
// Spins live in {-1,+1} but states store {0,1}; the mapping happens here.
class IsingModel final : public TargetModel {
 public:
  IsingModel(int n, double lambda, std::vector<double> alpha);

  int num_vars() const override { return n_ * n_; }
  int cardinality(int) const override { return 2; }
  double log_prob(const DiscreteState& x) const override;
  double delta_log_prob(const DiscreteState& x, int site, int new_value) const override;

  int side() const { return n_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& alpha() const { return alpha_; }

 private:
  int n_;
  double lambda_;
  std::vector<double> alpha_;
};

// Synthetic observation for the image-segmentation posterior: each pixel is
// drawn as y_i ~ Normal(mu * truth_i, sigma^2) and contributes the per-site
// bias alpha_i = y_i * mu / sigma^2.
struct ObservationSpec {
  double mu = 1.0;
  double sigma = 3.0;
  std::vector<int> ground_truth;  // entries in {-1,+1}
  std::uint64_t seed = 0;
};

std::vector<double> generate_observation(const ObservationSpec& spec);

// Centered square of +1 (side n/2) on a -1 background; the stock test image.
std::vector<int> square_ground_truth(int n);

}  // namespace lsb

#endif  // LSB_ISING_HPP
