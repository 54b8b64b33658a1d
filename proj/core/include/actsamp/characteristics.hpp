#ifndef ACTSAMP_CHARACTERISTICS_HPP
#define ACTSAMP_CHARACTERISTICS_HPP

#include <Eigen/Dense>

#include "actsamp/population.hpp"

namespace actsamp {

enum class CharacteristicKind {
  LinearTotal,          // h(u) = u, scalar response
  LinearMean,           // h(u) = u / N, scalar response
  HajekMean,            // h(u) = u2 / u1 with y_i = (1, y_i)
  RatioOfWeightedTotals // h(u) = u2 / u1 with y_i = p_i (r_i, r_i x_i)
};

// Smooth function of the population totals together with the response mapping
// dimension it expects.  value/gradient throw DomainError outside the domain
// of h (zero denominator for the ratio kinds).
class Characteristic {
public:
  static Characteristic linear_total();
  static Characteristic linear_mean(int population_size);
  static Characteristic hajek_mean();
  static Characteristic ratio_of_weighted_totals();

  CharacteristicKind kind() const { return kind_; }
  int dimension() const;

  double value(const Eigen::VectorXd& totals) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& totals) const;

private:
  Characteristic(CharacteristicKind kind, int population_size)
      : kind_(kind), population_size_(population_size) {}

  CharacteristicKind kind_;
  int population_size_;
};

// Response mapping for the scalar-response kinds: LinearTotal and LinearMean
// keep y as a single column, HajekMean prepends the constant count column.
Eigen::MatrixXd map_scalar_responses(CharacteristicKind kind, const Eigen::VectorXd& y);

// Response mapping for RatioOfWeightedTotals: row i is p_i * (r_i, r_i * x_i).
Eigen::MatrixXd map_event_outcome_responses(const Eigen::VectorXd& prior_weights,
                                            const Eigen::VectorXd& event,
                                            const Eigen::VectorXd& outcome);

// Population totals t_y, checked against the characteristic dimension.
Eigen::VectorXd true_totals(const Population& pop, const Characteristic& c);

}  // namespace actsamp

#endif
