#ifndef ACTSAMP_SCHEMES_HPP
#define ACTSAMP_SCHEMES_HPP

#include <Eigen/Dense>
#include <vector>

#include "actsamp/population.hpp"
#include "actsamp/random.hpp"

namespace actsamp {

// Mixing weight for the uniform floor applied to every constructed scheme:
// pi <- (1 - eps) * pi + eps / N, so min_i pi_i >= eps / N.
inline constexpr double kDefaultFloorEpsilon = 1e-3;

// Strictly positive selection probabilities summing to one.
struct SamplingScheme {
  Eigen::VectorXd probabilities;

  int size() const { return static_cast<int>(probabilities.size()); }

  // Validates positivity, finiteness and the unit sum (1e-12 tolerance).
  static SamplingScheme from_probabilities(Eigen::VectorXd probabilities);

  // Normalizes nonnegative weights, mixes in the uniform floor and pins the
  // sum to one exactly.  Throws DegenerateScheme when all weights vanish.
  static SamplingScheme from_weights(const Eigen::VectorXd& weights,
                                     double floor_epsilon = kDefaultFloorEpsilon);
};

// One multinomial batch: counts s_i with sum n and expected counts mu_i = n pi_i.
struct BatchDraw {
  Eigen::VectorXi counts;
  int batch_size = 0;
  Eigen::VectorXd expected_counts;
};

// Multinomial(n, pi) via sequential conditional binomials, O(N + n) per draw
// and reproducible given the stream.
BatchDraw draw_multinomial(const SamplingScheme& scheme, int n, RandomStream& rng);

// Closed-form minimizer of sum_i c_i / pi_i over the simplex: pi* = sqrt(c) /
// sum sqrt(c).  No floor is applied here.  Throws DegenerateScheme when every
// score is zero.
Eigen::VectorXd sqrt_weight_rule(const Eigen::VectorXd& scores);

// Scheme minimizing the sample-weighted total variance when responses are
// known: scores c_i = (grad' y_i)^2.
SamplingScheme optimal_scheme_known(const Eigen::MatrixXd& responses,
                                    const Eigen::VectorXd& gradient,
                                    double floor_epsilon = kDefaultFloorEpsilon);

// Predictive variant: scores c_i = (grad' eta_i)^2 + grad' Sigma_i grad.
SamplingScheme optimal_scheme_predictive(const Eigen::MatrixXd& predicted_means,
                                         const std::vector<Eigen::MatrixXd>& residual_covariances,
                                         const Eigen::VectorXd& gradient,
                                         double floor_epsilon = kDefaultFloorEpsilon);

// Ratio-of-weighted-totals variant driven by a two part prediction: scores
// c_i = p_i^2 rhat_i [ (xhat_i - theta_prev)^2 + sd_i^2 ].
SamplingScheme two_part_ratio_scheme(const Eigen::VectorXd& prior_weights,
                                     const Eigen::VectorXd& event_probability,
                                     const Eigen::VectorXd& outcome_mean,
                                     const Eigen::VectorXd& outcome_sd,
                                     double theta_prev,
                                     double floor_epsilon = kDefaultFloorEpsilon);

enum class BaselineKind { Uniform, ProportionalToAux, Density, Severity, Leverage };

// Non-adaptive reference schemes.  ProportionalToAux uses the designated
// auxiliary column (strictly positive).  Severity multiplies the prior weight
// by every auxiliary column affinely rescaled to [0.1, 1].  Leverage uses the
// diagonal of the prior-weighted hat matrix of (1, z).
SamplingScheme baseline_scheme(BaselineKind kind, const Population& pop,
                               double floor_epsilon = kDefaultFloorEpsilon,
                               int aux_column = 0);

// Hat matrix diagonal of the design (1, z) under weights w (w_i > 0), via a
// rank revealing QR.  Throws SingularDesign when the condition estimate
// exceeds 1e12.
Eigen::VectorXd leverage_scores(const Eigen::MatrixXd& auxiliaries,
                                const Eigen::VectorXd& weights);

// Exact covariance of the sample-weighted total over one batch of n draws:
// Cov(t_hat) = (1/n) (sum_i y_i y_i' / pi_i - t_y t_y').
Eigen::MatrixXd exact_hh_covariance(const Eigen::MatrixXd& responses,
                                    const SamplingScheme& scheme, int n);

}  // namespace actsamp

#endif
