#ifndef ACTSAMP_ESTIMATION_HPP
#define ACTSAMP_ESTIMATION_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "actsamp/characteristics.hpp"
#include "actsamp/random.hpp"
#include "actsamp/schemes.hpp"

namespace actsamp {

enum class VarianceMethod { Design, Martingale, Bootstrap };

// One completed batch: the realized counts, the expected counts mu_ji that
// weighted the draws, and the batch total t_hat_j.
struct HistoryRecord {
  int batch_size = 0;
  Eigen::VectorXi counts;
  Eigen::VectorXd expected_counts;
  Eigen::VectorXd batch_total;
};

struct SampleHistory {
  std::vector<HistoryRecord> records;

  int iterations() const { return static_cast<int>(records.size()); }
  // m_k, the total number of selections across batches.
  int total_draws() const;
};

// Sample-weighted batch total sum_i s_i y_i / mu_i.  Response rows are read
// only where s_i > 0, so unlabeled rows may hold arbitrary values.
Eigen::VectorXd hh_batch_total(const BatchDraw& draw, const Eigen::MatrixXd& responses);

// Pooled total (1/m_k) sum_j n_j t_hat_j.
Eigen::VectorXd pool_totals(const SampleHistory& history);

// Within-batch covariance estimate for one batch total:
// n_j/(n_j-1) sum_i s_i (y_i/mu_i - t_hat_j/n_j)(...)'.
// Throws BatchTooSmall when the batch holds a single draw.
Eigen::MatrixXd syg_batch_cov(const HistoryRecord& record, const Eigen::MatrixXd& responses);

// Pooled design covariance m_k^{-2} sum_j n_j^2 Phi_hat_j.
Eigen::MatrixXd pooled_design_variance(const SampleHistory& history,
                                       const Eigen::MatrixXd& responses);

// Between-batch covariance m_k^{-2} sum_j n_j^2 (t_hat_j - t_pool)(...)'.
// A single batch carries no spread; the zero matrix is returned with
// sufficient = false.
struct MartingaleCovariance {
  Eigen::MatrixXd psi;
  bool sufficient = false;
};
MartingaleCovariance martingale_variance(const SampleHistory& history);

// Resamples the m_k per-selection records (value y_i/mu_ji tagged with its
// source batch j) with replacement, rebuilds the pooled total per replicate
// and returns the replicate covariance with divisor B-1.
Eigen::MatrixXd bootstrap_variance(const SampleHistory& history,
                                   const Eigen::MatrixXd& responses, int replicates,
                                   RandomStream& rng);

// Delta method variance grad' Psi grad evaluated at the pooled totals.  A
// tiny negative quadratic form (|v| < 1e-12 ||Psi||_F) clamps to zero; a
// larger one indicates a broken covariance input and throws.
double delta_variance(const Characteristic& characteristic,
                      const Eigen::VectorXd& pooled_totals, const Eigen::MatrixXd& psi);

// Two sided normal interval theta_hat -/+ z_{alpha/2} sqrt(variance).
std::pair<double, double> confidence_interval(double theta_hat, double variance_hat,
                                              double alpha);

// Standard normal quantile, relative error below 1e-9 on (0, 1).
double normal_quantile(double p);

struct PooledEstimate {
  Eigen::VectorXd pooled_totals;
  double theta_hat = 0.0;
  double variance_hat = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  VarianceMethod method = VarianceMethod::Design;
};

}  // namespace actsamp

#endif
