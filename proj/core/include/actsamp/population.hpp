#ifndef ACTSAMP_POPULATION_HPP
#define ACTSAMP_POPULATION_HPP

#include <Eigen/Dense>

namespace actsamp {

// Finite population after response mapping: row i holds the (possibly
// vector valued) response y_i entering the totals, the auxiliaries z_i known
// for every element, and a strictly positive prior weight p_i.
struct Population {
  Eigen::MatrixXd responses;     // N x d
  Eigen::MatrixXd auxiliaries;   // N x q
  Eigen::VectorXd prior_weights; // N

  int size() const { return static_cast<int>(responses.rows()); }
  int response_dim() const { return static_cast<int>(responses.cols()); }
  int aux_dim() const { return static_cast<int>(auxiliaries.cols()); }

  // Validates shapes, finiteness and weight positivity.  Empty prior weights
  // default to all ones.
  static Population create(Eigen::MatrixXd responses, Eigen::MatrixXd auxiliaries,
                           Eigen::VectorXd prior_weights = Eigen::VectorXd());
};

}  // namespace actsamp

#endif
