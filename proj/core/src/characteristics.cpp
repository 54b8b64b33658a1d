#include "actsamp/characteristics.hpp"

#include "actsamp/errors.hpp"

namespace actsamp {

Characteristic Characteristic::linear_total() {
  return Characteristic(CharacteristicKind::LinearTotal, 0);
}

Characteristic Characteristic::linear_mean(int population_size) {
  if (population_size < 1) throw ConfigError("linear mean needs a positive population size");
  return Characteristic(CharacteristicKind::LinearMean, population_size);
}

Characteristic Characteristic::hajek_mean() {
  return Characteristic(CharacteristicKind::HajekMean, 0);
}

Characteristic Characteristic::ratio_of_weighted_totals() {
  return Characteristic(CharacteristicKind::RatioOfWeightedTotals, 0);
}

int Characteristic::dimension() const {
  switch (kind_) {
    case CharacteristicKind::LinearTotal:
    case CharacteristicKind::LinearMean:
      return 1;
    case CharacteristicKind::HajekMean:
    case CharacteristicKind::RatioOfWeightedTotals:
      return 2;
  }
  return 0;
}

double Characteristic::value(const Eigen::VectorXd& totals) const {
  if (totals.size() != dimension()) throw ConfigError("totals have the wrong dimension");
  switch (kind_) {
    case CharacteristicKind::LinearTotal:
      return totals[0];
    case CharacteristicKind::LinearMean:
      return totals[0] / static_cast<double>(population_size_);
    case CharacteristicKind::HajekMean:
    case CharacteristicKind::RatioOfWeightedTotals:
      if (totals[0] == 0.0) throw DomainError("ratio characteristic with zero denominator total");
      return totals[1] / totals[0];
  }
  return 0.0;
}

Eigen::VectorXd Characteristic::gradient(const Eigen::VectorXd& totals) const {
  if (totals.size() != dimension()) throw ConfigError("totals have the wrong dimension");
  Eigen::VectorXd g(dimension());
  switch (kind_) {
    case CharacteristicKind::LinearTotal:
      g[0] = 1.0;
      break;
    case CharacteristicKind::LinearMean:
      g[0] = 1.0 / static_cast<double>(population_size_);
      break;
    case CharacteristicKind::HajekMean:
    case CharacteristicKind::RatioOfWeightedTotals:
      if (totals[0] == 0.0) throw DomainError("ratio characteristic with zero denominator total");
      g[0] = -totals[1] / (totals[0] * totals[0]);
      g[1] = 1.0 / totals[0];
      break;
  }
  return g;
}

Eigen::MatrixXd map_scalar_responses(CharacteristicKind kind, const Eigen::VectorXd& y) {
  switch (kind) {
    case CharacteristicKind::LinearTotal:
    case CharacteristicKind::LinearMean:
      return y;
    case CharacteristicKind::HajekMean: {
      Eigen::MatrixXd mapped(y.size(), 2);
      mapped.col(0).setOnes();
      mapped.col(1) = y;
      return mapped;
    }
    case CharacteristicKind::RatioOfWeightedTotals:
      throw ConfigError("ratio of weighted totals needs event and outcome columns");
  }
  return {};
}

Eigen::MatrixXd map_event_outcome_responses(const Eigen::VectorXd& prior_weights,
                                            const Eigen::VectorXd& event,
                                            const Eigen::VectorXd& outcome) {
  const auto n = prior_weights.size();
  if (event.size() != n || outcome.size() != n)
    throw ConfigError("event/outcome columns disagree on the population size");
  Eigen::MatrixXd mapped(n, 2);
  mapped.col(0) = prior_weights.array() * event.array();
  mapped.col(1) = prior_weights.array() * event.array() * outcome.array();
  return mapped;
}

Eigen::VectorXd true_totals(const Population& pop, const Characteristic& c) {
  if (pop.response_dim() != c.dimension())
    throw ConfigError("population responses do not match the characteristic dimension");
  return pop.responses.colwise().sum();
}

}  // namespace actsamp
