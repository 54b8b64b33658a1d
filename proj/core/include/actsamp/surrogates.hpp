#ifndef ACTSAMP_SURROGATES_HPP
#define ACTSAMP_SURROGATES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace actsamp {

enum class SurrogateKind { LinearLS, KNearest, KernelRidge };

struct SurrogateConfig {
  SurrogateKind kind = SurrogateKind::KernelRidge;
  // Fits are refused below this many labeled elements.
  int min_fit_size = 10;
  int cv_folds = 5;
  int knn_neighbors = 5;
  // Kernel ridge grids: bandwidths as multiples of the median pairwise
  // distance between labeled points, ridge penalties relative to the number
  // of training rows.
  std::vector<double> bandwidth_grid{0.5, 1.0, 2.0};
  std::vector<double> ridge_grid{1e-6, 1e-4, 1e-2};
  // Diagonal residual variances are clamped below at
  // variance_floor_scale * var(labeled responses) (or the scale alone when
  // that variance is zero).
  double variance_floor_scale = 1e-6;
  std::uint64_t fold_seed = 0;
  // Clamp predictions into [1e-6, 1 - 1e-6], for {0,1}-valued targets fitted
  // as regressions.
  bool clamp_unit_interval = false;
};

// Labeled elements with set semantics: indices are unique and sorted.
struct LabeledSet {
  std::vector<int> indices;
  Eigen::MatrixXd responses;    // |L| x d
  Eigen::MatrixXd auxiliaries;  // |L| x q

  int size() const { return static_cast<int>(indices.size()); }

  static LabeledSet create(std::vector<int> indices, Eigen::MatrixXd responses,
                           Eigen::MatrixXd auxiliaries);
};

struct SurrogateFit {
  Eigen::MatrixXd predicted_means;                    // N x d
  std::vector<Eigen::MatrixXd> residual_covariances;  // N diagonal d x d matrices
  bool success = false;       // holdout score above zero
  double holdout_score = 0.0; // out-of-fold R^2, pooled over non-constant coordinates
};

// Fits the configured model to the labeled responses coordinate-wise,
// predicts every population element indexed by all_auxiliaries, and attaches
// the homoscedastic diagonal residual covariance estimated from the
// cross-validation folds.  Throws FitFailed for structural failures (too few
// labels, singular design, no viable hyperparameters); a fit whose holdout
// score is not positive is returned with success = false.
SurrogateFit fit_surrogate(const LabeledSet& labeled, const Eigen::MatrixXd& all_auxiliaries,
                           const SurrogateConfig& config);

// The residual covariance part alone: pooled out-of-fold second moments on
// the hold-out folds, broadcast to population_size diagonal matrices.
std::vector<Eigen::MatrixXd> cv_residual_covariance(const LabeledSet& labeled,
                                                    int population_size,
                                                    const SurrogateConfig& config);

// Two part prediction for ratio-of-weighted-totals targets: an event
// probability model fitted to the {0,1} event column and an outcome model
// fitted to the outcome column of the event cases only.
struct EventOutcomeFit {
  Eigen::VectorXd event_probability;  // in [1e-6, 1 - 1e-6]
  Eigen::VectorXd outcome_mean;
  Eigen::VectorXd outcome_sd;
  bool success = false;
  double holdout_score = 0.0;  // min of the two model scores
};

// labeled.responses must hold the raw (event, outcome) columns.
EventOutcomeFit fit_event_outcome(const LabeledSet& labeled,
                                  const Eigen::MatrixXd& all_auxiliaries,
                                  const SurrogateConfig& config);

}  // namespace actsamp

#endif
