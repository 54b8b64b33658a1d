#include "actsamp/active_loop.hpp"

#include <cmath>
#include <limits>

#include "actsamp/errors.hpp"

namespace actsamp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void LoopConfig::validate() const {
  if (batch_sizes.empty()) throw ConfigError("at least one batch size is required");
  for (int n : batch_sizes) {
    if (n < 1) throw ConfigError("batch sizes must be positive");
    if (variance_method == VarianceMethod::Design && n < 2)
      throw ConfigError("design variance needs batches of at least two draws");
  }
  if (!(precision_target > 0.0)) throw ConfigError("precision target must be positive");
  if (refit_every < 1) throw ConfigError("refit cadence must be at least one iteration");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (floor_epsilon < 0.0 || floor_epsilon > 1.0)
    throw ConfigError("floor mixing weight must lie in [0, 1]");
  if (variance_method == VarianceMethod::Bootstrap && bootstrap_replicates < 2)
    throw ConfigError("bootstrap needs at least two replicates");
}

ActiveSampler::ActiveSampler(Eigen::MatrixXd auxiliaries, Eigen::VectorXd prior_weights,
                             Characteristic characteristic, LabelOracle oracle,
                             LoopConfig config)
    : auxiliaries_(std::move(auxiliaries)),
      prior_weights_(std::move(prior_weights)),
      characteristic_(characteristic),
      oracle_(std::move(oracle)),
      config_(std::move(config)),
      fallback_scheme_{Eigen::VectorXd()},
      draw_stream_(RandomStream(config_.seed).split(1)) {
  config_.validate();
  const auto n = auxiliaries_.rows();
  if (n < 1) throw ConfigError("population must contain at least one element");
  if (prior_weights_.size() == 0) prior_weights_ = Eigen::VectorXd::Ones(n);
  if (prior_weights_.size() != n)
    throw ConfigError("prior weights and auxiliaries disagree on the population size");
  if ((prior_weights_.array() <= 0.0).any())
    throw ConfigError("prior weights must be strictly positive");
  if (!oracle_) throw ConfigError("a label oracle is required");

  fallback_scheme_ = config_.fallback == FallbackKind::Uniform
                         ? SamplingScheme::from_weights(Eigen::VectorXd::Ones(n),
                                                        config_.floor_epsilon)
                         : SamplingScheme::from_weights(prior_weights_, config_.floor_epsilon);
  observed_ = Eigen::MatrixXd::Constant(n, characteristic_.dimension(), kNaN);
}

void ActiveSampler::refit_if_due(int iteration) {
  const bool due = !fit_.attempted || (iteration - 2) % config_.refit_every == 0;
  if (!due) return;
  fit_.attempted = true;
  fit_.usable = false;
  fit_.score = kNaN;

  const int m = static_cast<int>(labeled_.size());
  if (m < 1) return;
  std::vector<int> indices;
  indices.reserve(m);
  for (const auto& [idx, rec] : labeled_) indices.push_back(idx);

  const bool two_part = characteristic_.kind() == CharacteristicKind::RatioOfWeightedTotals;
  const int target_cols =
      two_part ? 2 : characteristic_.dimension();
  Eigen::MatrixXd targets(m, target_cols);
  Eigen::MatrixXd aux(m, auxiliaries_.cols());
  int row = 0;
  for (const auto& [idx, rec] : labeled_) {
    targets.row(row) = (two_part ? rec.raw : rec.mapped).transpose();
    aux.row(row) = auxiliaries_.row(idx);
    ++row;
  }

  try {
    const LabeledSet labeled = LabeledSet::create(std::move(indices), std::move(targets),
                                                  std::move(aux));
    if (two_part) {
      fit_.two_part = fit_event_outcome(labeled, auxiliaries_, config_.surrogate);
      fit_.usable = fit_.two_part.success;
      fit_.score = fit_.two_part.holdout_score;
    } else {
      fit_.coordinate = fit_surrogate(labeled, auxiliaries_, config_.surrogate);
      fit_.usable = fit_.coordinate.success;
      fit_.score = fit_.coordinate.holdout_score;
    }
  } catch (const FitFailed&) {
    fit_.usable = false;
  }
}

std::optional<SamplingScheme> ActiveSampler::model_scheme() const {
  if (!fit_.usable) return std::nullopt;
  const Eigen::VectorXd pooled = pool_totals(history_);
  try {
    if (characteristic_.kind() == CharacteristicKind::RatioOfWeightedTotals) {
      const double theta_prev = characteristic_.value(pooled);
      const Eigen::VectorXd sd =
          config_.naive_mode ? Eigen::VectorXd::Zero(fit_.two_part.outcome_sd.size())
                             : fit_.two_part.outcome_sd;
      return two_part_ratio_scheme(prior_weights_, fit_.two_part.event_probability,
                                   fit_.two_part.outcome_mean, sd, theta_prev,
                                   config_.floor_epsilon);
    }
    const Eigen::VectorXd grad = characteristic_.gradient(pooled);
    if (config_.naive_mode) {
      const std::vector<Eigen::MatrixXd> zero_covariances(
          auxiliaries_.rows(), Eigen::MatrixXd::Zero(characteristic_.dimension(),
                                                     characteristic_.dimension()));
      return optimal_scheme_predictive(fit_.coordinate.predicted_means, zero_covariances,
                                       grad, config_.floor_epsilon);
    }
    return optimal_scheme_predictive(fit_.coordinate.predicted_means,
                                     fit_.coordinate.residual_covariances, grad,
                                     config_.floor_epsilon);
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const DegenerateScheme&) {
    return std::nullopt;
  }
}

bool ActiveSampler::step_allowed() const {
  if (finished_ && reason_ == TerminationReason::OracleFailure) return false;
  return history_.iterations() < config_.max_iterations();
}

SamplingScheme ActiveSampler::next_scheme() {
  if (!step_allowed()) throw ConfigError("the loop has no iterations left");
  const int k = upcoming_iteration();
  if (k == 1) {
    last_used_fallback_ = true;
    return fallback_scheme_;
  }
  refit_if_due(k);
  auto scheme = model_scheme();
  last_used_fallback_ = !scheme.has_value();
  return scheme.value_or(fallback_scheme_);
}

bool ActiveSampler::absorb(const BatchDraw& draw) {
  if (!step_allowed()) throw ConfigError("the loop has no iterations left");
  if (draw.counts.size() != auxiliaries_.rows())
    throw ConfigError("draw and population disagree on the size");

  // Label newly selected elements; each element costs one oracle call ever.
  for (Eigen::Index i = 0; i < draw.counts.size(); ++i) {
    if (draw.counts[i] == 0 || labeled_.count(static_cast<int>(i))) continue;
    LabelRecord rec;
    try {
      rec = oracle_(static_cast<int>(i));
      if (rec.mapped.size() != characteristic_.dimension())
        throw OracleFailure("oracle returned a response of the wrong dimension");
      if (characteristic_.kind() == CharacteristicKind::RatioOfWeightedTotals &&
          rec.raw.size() != 2)
        throw OracleFailure("oracle must return raw (event, outcome) columns");
      if (!rec.mapped.allFinite())
        throw OracleFailure("oracle returned a non-finite response");
    } catch (const std::exception&) {
      finished_ = true;
      reason_ = TerminationReason::OracleFailure;
      return true;
    }
    observed_.row(i) = rec.mapped.transpose();
    labeled_.emplace(static_cast<int>(i), std::move(rec));
  }

  history_.records.push_back(HistoryRecord{draw.batch_size, draw.counts,
                                           draw.expected_counts,
                                           hh_batch_total(draw, observed_)});
  estimate_after_batch();

  if (finished_) return true;
  if (history_.iterations() >= config_.max_iterations()) {
    finished_ = true;
    reason_ = TerminationReason::IterationLimit;
  }
  return finished_;
}

void ActiveSampler::estimate_after_batch() {
  const int k = history_.iterations();
  IterationTrace t;
  t.iteration = k;
  t.used_fallback = last_used_fallback_;
  t.fit_attempted = fit_.attempted;
  t.surrogate_success = fit_.usable;
  t.holdout_score = fit_.score;
  t.labeled_count = static_cast<int>(labeled_.size());
  t.cumulative_draws = history_.total_draws();
  t.theta_hat = t.std_error = t.ci_low = t.ci_high = kNaN;

  const Eigen::VectorXd pooled = pool_totals(history_);
  double theta = kNaN;
  try {
    theta = characteristic_.value(pooled);
    t.theta_defined = true;
    t.theta_hat = theta;
  } catch (const DomainError&) {
    t.theta_defined = false;
  }

  Eigen::MatrixXd psi;
  bool psi_defined = false;
  switch (config_.variance_method) {
    case VarianceMethod::Design:
      psi = pooled_design_variance(history_, observed_);
      psi_defined = true;
      break;
    case VarianceMethod::Martingale: {
      const MartingaleCovariance mc = martingale_variance(history_);
      psi = mc.psi;
      psi_defined = mc.sufficient;
      break;
    }
    case VarianceMethod::Bootstrap: {
      RandomStream boot = RandomStream(config_.seed).split(0xB007u).split(k);
      psi = bootstrap_variance(history_, observed_, config_.bootstrap_replicates, boot);
      psi_defined = true;
      break;
    }
  }

  if (t.theta_defined && psi_defined) {
    try {
      const double var = delta_variance(characteristic_, pooled, psi);
      const auto [lo, hi] = confidence_interval(theta, var, config_.alpha);
      t.variance_defined = true;
      t.std_error = std::sqrt(var);
      t.ci_low = lo;
      t.ci_high = hi;

      last_full_estimate_ = PooledEstimate{pooled, theta,          var,
                                           t.std_error, lo, hi,
                                           config_.variance_method};
      have_full_estimate_ = true;

      if (t.std_error < config_.precision_target) {
        finished_ = true;
        reason_ = TerminationReason::PrecisionReached;
      }
    } catch (const DomainError&) {
      t.variance_defined = false;  // gradient undefined at the pooled totals
    }
  }

  // Scheme spread for diagnostics.
  const auto& mu = history_.records.back().expected_counts;
  const double n = static_cast<double>(history_.records.back().batch_size);
  t.min_probability = mu.minCoeff() / n;
  t.max_probability = mu.maxCoeff() / n;

  trace_.push_back(t);
}

LoopResult ActiveSampler::result() const {
  LoopResult r;
  r.estimate = last_full_estimate_;
  r.estimate_defined = have_full_estimate_;
  r.reason = reason_;
  r.history = history_;
  r.trace = trace_;
  r.labeled_indices.reserve(labeled_.size());
  for (const auto& [idx, rec] : labeled_) r.labeled_indices.push_back(idx);
  return r;
}

LoopResult ActiveSampler::run() {
  while (!finished_) {
    const SamplingScheme scheme = next_scheme();
    const int n = config_.batch_sizes[history_.iterations()];
    absorb(draw_multinomial(scheme, n, draw_stream_));
  }
  return result();
}

LoopResult run_active_sampling(Eigen::MatrixXd auxiliaries, Eigen::VectorXd prior_weights,
                               const Characteristic& characteristic, const LabelOracle& oracle,
                               const LoopConfig& config) {
  ActiveSampler sampler(std::move(auxiliaries), std::move(prior_weights), characteristic,
                        oracle, config);
  return sampler.run();
}

long long pilot_sample_size(double pilot_variance, double precision_target) {
  if (!(pilot_variance >= 0.0)) throw ConfigError("pilot variance must be nonnegative");
  if (!(precision_target > 0.0)) throw ConfigError("precision target must be positive");
  const double n = std::ceil(pilot_variance / (precision_target * precision_target));
  if (n < 1.0) return 1;
  return static_cast<long long>(n);
}

}  // namespace actsamp
