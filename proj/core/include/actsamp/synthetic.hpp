#ifndef ACTSAMP_SYNTHETIC_HPP
#define ACTSAMP_SYNTHETIC_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace actsamp {

enum class Scenario { StrictlyPositive, ZeroMean };

// Smooth random population over a one dimensional auxiliary grid: a Gaussian
// process draw plus white noise calibrated to the requested signal fraction,
// standardized to unit variance and shifted per scenario (minimum 0.1 or mean
// zero).  kernel_bandwidth controls smoothness: 0.1 is wiggly, 10 is close to
// a straight line.
struct SyntheticSpec {
  int population_size = 1000;
  double grid_low = 0.001;
  double grid_high = 1.0;
  double kernel_bandwidth = 1.0;
  double target_r2 = 0.5;  // var(signal) / var(signal + noise)
  Scenario scenario = Scenario::StrictlyPositive;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Eigen::VectorXd z;
  Eigen::VectorXd y;
  double realized_signal_r2 = 0.0;  // before standardization
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace actsamp

#endif
