#include "actsamp/population.hpp"

#include "actsamp/errors.hpp"

namespace actsamp {

Population Population::create(Eigen::MatrixXd responses, Eigen::MatrixXd auxiliaries,
                              Eigen::VectorXd prior_weights) {
  const auto n = responses.rows();
  if (n < 1) throw ConfigError("population must contain at least one element");
  if (responses.cols() < 1) throw ConfigError("responses need at least one column");
  if (auxiliaries.rows() != n)
    throw ConfigError("auxiliaries and responses disagree on the population size");
  if (prior_weights.size() == 0) prior_weights = Eigen::VectorXd::Ones(n);
  if (prior_weights.size() != n)
    throw ConfigError("prior weights and responses disagree on the population size");
  if (!responses.allFinite() || !auxiliaries.allFinite() || !prior_weights.allFinite())
    throw ConfigError("population contains non-finite entries");
  if ((prior_weights.array() <= 0.0).any())
    throw ConfigError("prior weights must be strictly positive");
  return Population{std::move(responses), std::move(auxiliaries), std::move(prior_weights)};
}

}  // namespace actsamp
