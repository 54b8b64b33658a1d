#include "actsamp/schemes.hpp"

#include <cmath>

#include "actsamp/errors.hpp"

namespace actsamp {
namespace {

// Inverse-CDF Binomial(m, p) at uniform u, walking the pmf recurrence in log
// space so that large m with small pmf(0) does not underflow to a dead walk.
int inverse_binomial(int m, double p, double u) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return m;
  double log_pmf = static_cast<double>(m) * std::log1p(-p);
  double cdf = std::exp(log_pmf);
  const double log_odds = std::log(p) - std::log1p(-p);
  int k = 0;
  while (u > cdf && k < m) {
    log_pmf += std::log(static_cast<double>(m - k) / static_cast<double>(k + 1)) + log_odds;
    ++k;
    cdf += std::exp(log_pmf);
  }
  return k;
}

// Rescales a factor column affinely onto [0.1, 1]; a constant column carries
// no ordering information and maps to 1.
Eigen::VectorXd unit_band_rescale(const Eigen::VectorXd& column) {
  const double lo = column.minCoeff();
  const double hi = column.maxCoeff();
  if (hi <= lo) return Eigen::VectorXd::Ones(column.size());
  return (0.1 + 0.9 * (column.array() - lo) / (hi - lo)).matrix();
}

}  // namespace

SamplingScheme SamplingScheme::from_probabilities(Eigen::VectorXd probabilities) {
  if (probabilities.size() < 1) throw ConfigError("scheme needs at least one element");
  if (!probabilities.allFinite()) throw ConfigError("scheme probabilities must be finite");
  if ((probabilities.array() <= 0.0).any())
    throw DegenerateScheme("scheme probabilities must be strictly positive");
  if (std::abs(probabilities.sum() - 1.0) > 1e-12)
    throw ConfigError("scheme probabilities must sum to one");
  return SamplingScheme{std::move(probabilities)};
}

SamplingScheme SamplingScheme::from_weights(const Eigen::VectorXd& weights,
                                            double floor_epsilon) {
  if (weights.size() < 1) throw ConfigError("scheme needs at least one element");
  if (!weights.allFinite()) throw ConfigError("scheme weights must be finite");
  if ((weights.array() < 0.0).any()) throw ConfigError("scheme weights must be nonnegative");
  if (floor_epsilon < 0.0 || floor_epsilon > 1.0)
    throw ConfigError("floor mixing weight must lie in [0, 1]");
  const double total = weights.sum();
  if (total <= 0.0) throw DegenerateScheme("all scheme weights are zero");

  const double n = static_cast<double>(weights.size());
  Eigen::VectorXd pi =
      ((1.0 - floor_epsilon) * weights.array() / total + floor_epsilon / n).matrix();
  // Pin the sum to one exactly by absorbing the rounding residual into the
  // largest probability.
  Eigen::Index argmax = 0;
  pi.maxCoeff(&argmax);
  pi[argmax] += 1.0 - pi.sum();
  return from_probabilities(std::move(pi));
}

BatchDraw draw_multinomial(const SamplingScheme& scheme, int n, RandomStream& rng) {
  if (n < 1) throw ConfigError("batch size must be positive");
  const int size = scheme.size();
  const Eigen::VectorXd& pi = scheme.probabilities;

  // Stable tail sums so the conditional success probabilities do not drift.
  Eigen::VectorXd tail(size);
  double acc = 0.0;
  for (int i = size - 1; i >= 0; --i) {
    acc += pi[i];
    tail[i] = acc;
  }

  Eigen::VectorXi counts = Eigen::VectorXi::Zero(size);
  int remaining = n;
  for (int i = 0; i < size && remaining > 0; ++i) {
    const double p = pi[i] / tail[i];
    int s;
    if (i == size - 1 || p >= 1.0) {
      s = remaining;
    } else {
      s = inverse_binomial(remaining, p, rng.uniform());
    }
    counts[i] = s;
    remaining -= s;
  }

  BatchDraw draw;
  draw.counts = std::move(counts);
  draw.batch_size = n;
  draw.expected_counts = static_cast<double>(n) * pi;
  return draw;
}

Eigen::VectorXd sqrt_weight_rule(const Eigen::VectorXd& scores) {
  if (scores.size() < 1) throw ConfigError("score vector is empty");
  if (!scores.allFinite()) throw ConfigError("scores must be finite");
  if ((scores.array() < 0.0).any()) throw ConfigError("scores must be nonnegative");
  Eigen::VectorXd w = scores.array().sqrt().matrix();
  const double total = w.sum();
  if (total <= 0.0) throw DegenerateScheme("all optimality scores are zero");
  return w / total;
}

SamplingScheme optimal_scheme_known(const Eigen::MatrixXd& responses,
                                    const Eigen::VectorXd& gradient,
                                    double floor_epsilon) {
  if (responses.cols() != gradient.size())
    throw ConfigError("gradient dimension does not match the responses");
  // sqrt of (grad' y_i)^2 is just the absolute projection.
  Eigen::VectorXd w = (responses * gradient).cwiseAbs();
  return SamplingScheme::from_weights(w, floor_epsilon);
}

SamplingScheme optimal_scheme_predictive(const Eigen::MatrixXd& predicted_means,
                                         const std::vector<Eigen::MatrixXd>& residual_covariances,
                                         const Eigen::VectorXd& gradient,
                                         double floor_epsilon) {
  const auto n = predicted_means.rows();
  if (predicted_means.cols() != gradient.size())
    throw ConfigError("gradient dimension does not match the predictions");
  if (static_cast<Eigen::Index>(residual_covariances.size()) != n)
    throw ConfigError("one residual covariance per element is required");
  Eigen::VectorXd projection = predicted_means * gradient;
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd& cov = residual_covariances[i];
    if (cov.rows() != gradient.size() || cov.cols() != gradient.size())
      throw ConfigError("residual covariance has the wrong dimension");
    double quad = gradient.dot(cov * gradient);
    if (quad < 0.0) quad = 0.0;  // PSD up to roundoff
    w[i] = std::sqrt(projection[i] * projection[i] + quad);
  }
  return SamplingScheme::from_weights(w, floor_epsilon);
}

SamplingScheme two_part_ratio_scheme(const Eigen::VectorXd& prior_weights,
                                     const Eigen::VectorXd& event_probability,
                                     const Eigen::VectorXd& outcome_mean,
                                     const Eigen::VectorXd& outcome_sd,
                                     double theta_prev,
                                     double floor_epsilon) {
  const auto n = prior_weights.size();
  if (event_probability.size() != n || outcome_mean.size() != n || outcome_sd.size() != n)
    throw ConfigError("two part prediction columns disagree on the population size");
  if (!std::isfinite(theta_prev)) throw ConfigError("previous estimate must be finite");
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dev = outcome_mean[i] - theta_prev;
    const double score = prior_weights[i] * prior_weights[i] * event_probability[i] *
                         (dev * dev + outcome_sd[i] * outcome_sd[i]);
    w[i] = std::sqrt(score < 0.0 ? 0.0 : score);
  }
  return SamplingScheme::from_weights(w, floor_epsilon);
}

SamplingScheme baseline_scheme(BaselineKind kind, const Population& pop,
                               double floor_epsilon, int aux_column) {
  const int n = pop.size();
  switch (kind) {
    case BaselineKind::Uniform:
      return SamplingScheme::from_weights(Eigen::VectorXd::Ones(n), floor_epsilon);
    case BaselineKind::ProportionalToAux: {
      if (aux_column < 0 || aux_column >= pop.aux_dim())
        throw ConfigError("auxiliary column out of range");
      Eigen::VectorXd col = pop.auxiliaries.col(aux_column);
      if ((col.array() <= 0.0).any())
        throw DegenerateScheme("size proportional scheme needs a strictly positive auxiliary");
      return SamplingScheme::from_weights(col, floor_epsilon);
    }
    case BaselineKind::Density:
      return SamplingScheme::from_weights(pop.prior_weights, floor_epsilon);
    case BaselineKind::Severity: {
      Eigen::VectorXd w = pop.prior_weights;
      for (int j = 0; j < pop.aux_dim(); ++j)
        w = w.cwiseProduct(unit_band_rescale(pop.auxiliaries.col(j)));
      return SamplingScheme::from_weights(w, floor_epsilon);
    }
    case BaselineKind::Leverage:
      return SamplingScheme::from_weights(leverage_scores(pop.auxiliaries, pop.prior_weights),
                                          floor_epsilon);
  }
  throw ConfigError("unknown baseline scheme");
}

Eigen::VectorXd leverage_scores(const Eigen::MatrixXd& auxiliaries,
                                const Eigen::VectorXd& weights) {
  const auto n = auxiliaries.rows();
  if (weights.size() != n) throw ConfigError("weights and auxiliaries disagree on the size");
  if ((weights.array() <= 0.0).any()) throw ConfigError("leverage weights must be positive");
  const auto p = auxiliaries.cols() + 1;
  if (n < p) throw SingularDesign("fewer elements than design columns");

  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  design.rightCols(auxiliaries.cols()) = auxiliaries;
  design.array().colwise() *= weights.array().sqrt();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  const double smallest = diag.tail(1)[0];
  if (smallest <= 0.0 || largest / smallest > 1e12)
    throw SingularDesign("design matrix is numerically singular");

  Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  return thin_q.array().square().rowwise().sum().matrix();
}

Eigen::MatrixXd exact_hh_covariance(const Eigen::MatrixXd& responses,
                                    const SamplingScheme& scheme, int n) {
  if (responses.rows() != scheme.size())
    throw ConfigError("responses and scheme disagree on the population size");
  if (n < 1) throw ConfigError("batch size must be positive");
  const Eigen::MatrixXd weighted =
      responses.array().colwise() / scheme.probabilities.array();
  const Eigen::MatrixXd second_moment = responses.transpose() * weighted;
  const Eigen::VectorXd totals = responses.colwise().sum();
  return (second_moment - totals * totals.transpose()) / static_cast<double>(n);
}

}  // namespace actsamp
