#include "actsamp/synthetic.hpp"

#include <cmath>

#include "actsamp/errors.hpp"
#include "actsamp/random.hpp"

namespace actsamp {

namespace {

double sample_variance(const Eigen::VectorXd& x) {
  if (x.size() < 2) return 0.0;
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.population_size < 2) throw ConfigError("population size must be at least 2");
  if (!(spec.grid_low < spec.grid_high)) throw ConfigError("grid bounds are inverted");
  if (!(spec.kernel_bandwidth > 0.0)) throw ConfigError("kernel bandwidth must be positive");
  if (!(spec.target_r2 > 0.0 && spec.target_r2 < 1.0))
    throw ConfigError("target signal fraction must lie in (0, 1)");

  const int n = spec.population_size;
  Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(n, spec.grid_low, spec.grid_high);

  Eigen::MatrixXd gram(n, n);
  const double inv = -0.5 / (spec.kernel_bandwidth * spec.kernel_bandwidth);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double d = z[i] - z[j];
      gram(i, j) = gram(j, i) = std::exp(inv * d * d);
    }

  // Cholesky with a small diagonal jitter; very smooth kernels are numerically
  // rank deficient, so the jitter escalates until the factorization succeeds.
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 1e-10;
  for (;;) {
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) break;
    jitter *= 10.0;
    if (jitter > 1e-4) throw ConfigError("kernel matrix could not be factorized");
  }

  RandomStream rng(spec.seed);
  Eigen::VectorXd white(n);
  for (int i = 0; i < n; ++i) white[i] = rng.normal();
  Eigen::VectorXd signal = llt.matrixL() * white;

  const double signal_var = sample_variance(signal);
  const double noise_sd =
      std::sqrt(signal_var * (1.0 - spec.target_r2) / spec.target_r2);
  Eigen::VectorXd y = signal;
  for (int i = 0; i < n; ++i) y[i] += noise_sd * rng.normal();

  SyntheticData data;
  data.realized_signal_r2 = signal_var / sample_variance(y);

  // Standardize, orient positively along z, then shift per scenario (the
  // shift preserves the unit variance).
  y.array() -= y.mean();
  const double sd = std::sqrt(sample_variance(y));
  if (sd > 0.0) y /= sd;
  const double zc = (z.array() - z.mean()).matrix().dot(y);
  if (zc < 0.0) y = -y;
  if (spec.scenario == Scenario::StrictlyPositive) {
    // (y - min) + 0.1 puts the minimum at exactly 0.1: the subtraction is 0.0
    // there, and no other element can round below 0.1.
    y.array() = (y.array() - y.minCoeff()) + 0.1;
  } else {
    y.array() -= y.mean();
  }

  data.z = std::move(z);
  data.y = std::move(y);
  return data;
}

}  // namespace actsamp
