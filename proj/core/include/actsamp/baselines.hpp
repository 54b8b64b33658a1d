#ifndef ACTSAMP_BASELINES_HPP
#define ACTSAMP_BASELINES_HPP

#include <Eigen/Dense>

#include "actsamp/schemes.hpp"

namespace actsamp {

// Classical survey estimators of the population mean of y from one
// with-replacement batch, using the scalar auxiliary z whose population mean
// is known.  Draw multiplicities enter all sample moments.

// population_mean_z * (sample mean of y / sample mean of z).
double ratio_estimate(const BatchDraw& draw, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& z, double population_mean_z);

// Regression adjustment: ybar + beta (population_mean_z - zbar) with the
// unweighted least squares slope of y on z in the sample.  A sample without
// auxiliary spread falls back to beta = 0.
double control_variate_estimate(const BatchDraw& draw, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& z, double population_mean_z);

}  // namespace actsamp

#endif
