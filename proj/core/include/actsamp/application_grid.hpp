#ifndef ACTSAMP_APPLICATION_GRID_HPP
#define ACTSAMP_APPLICATION_GRID_HPP

#include <Eigen/Dense>

namespace actsamp {

// Deterministic two-input test bed mimicking a scenario-weighted event study:
// elements lie on a rectangular grid of two inputs in (0, 1], each carries a
// strictly positive prior weight, a {0,1} event indicator from a smooth
// threshold surface, and a nonnegative outcome surface evaluated everywhere
// (it only enters the target through event * outcome).  The third auxiliary
// column is the outcome value at the far end of the first input axis, an a
// priori known severity proxy.
struct ApplicationGridSpec {
  int primary_levels = 50;
  int secondary_levels = 40;
};

struct ApplicationData {
  Eigen::MatrixXd auxiliaries;    // N x 3
  Eigen::VectorXd prior_weights;  // N
  Eigen::VectorXd event;          // N, values in {0, 1}
  Eigen::VectorXd outcome;        // N
  double theta_true = 0.0;        // sum p r x / sum p r
};

ApplicationData generate_application_grid(const ApplicationGridSpec& spec);

}  // namespace actsamp

#endif
