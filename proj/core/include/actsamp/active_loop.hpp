#ifndef ACTSAMP_ACTIVE_LOOP_HPP
#define ACTSAMP_ACTIVE_LOOP_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "actsamp/characteristics.hpp"
#include "actsamp/estimation.hpp"
#include "actsamp/schemes.hpp"
#include "actsamp/surrogates.hpp"

namespace actsamp {

// Label delivered by the oracle for one element: the mapped response row
// entering the totals, plus the raw study columns the surrogate trains on
// (the scalar response for the mean-type characteristics, (event, outcome)
// for the ratio of weighted totals).
struct LabelRecord {
  Eigen::VectorXd mapped;
  Eigen::VectorXd raw;
};

using LabelOracle = std::function<LabelRecord(int index)>;

enum class FallbackKind { Uniform, Density };
enum class TerminationReason { PrecisionReached, IterationLimit, OracleFailure };

struct LoopConfig {
  std::vector<int> batch_sizes;  // n_k, one entry per allowed iteration
  double precision_target = 0.0; // stop once the standard error drops below this
  SurrogateConfig surrogate;
  int refit_every = 1;           // surrogate refit cadence in iterations
  VarianceMethod variance_method = VarianceMethod::Design;
  bool naive_mode = false;       // ignore residual uncertainty in the scheme
  FallbackKind fallback = FallbackKind::Uniform;
  double alpha = 0.05;
  double floor_epsilon = kDefaultFloorEpsilon;
  int bootstrap_replicates = 500;
  std::uint64_t seed = 0;

  int max_iterations() const { return static_cast<int>(batch_sizes.size()); }
  void validate() const;
};

struct IterationTrace {
  int iteration = 0;
  bool used_fallback = false;
  bool fit_attempted = false;
  bool surrogate_success = false;
  double holdout_score = 0.0;
  double min_probability = 0.0;
  double max_probability = 0.0;
  bool theta_defined = false;
  bool variance_defined = false;
  double theta_hat = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int labeled_count = 0;
  int cumulative_draws = 0;
};

struct LoopResult {
  PooledEstimate estimate;
  bool estimate_defined = false;  // theta and variance both defined at the end
  TerminationReason reason = TerminationReason::IterationLimit;
  SampleHistory history;
  std::vector<int> labeled_indices;
  std::vector<IterationTrace> trace;
};

// Adaptive sampling driver.  run() performs the draw-label-estimate loop with
// the internal stream and stops at the first satisfied termination rule.
// next_scheme()/absorb() expose the same deterministic state machine step by
// step; they keep working through the whole iteration budget even after a
// precision stop, so external drivers can trace full estimate curves.  After
// an oracle failure or the last budgeted iteration, further steps throw.
class ActiveSampler {
public:
  ActiveSampler(Eigen::MatrixXd auxiliaries, Eigen::VectorXd prior_weights,
                Characteristic characteristic, LabelOracle oracle, LoopConfig config);

  // Scheme the sampler will use for the upcoming iteration.  Pure given the
  // absorbed history.
  SamplingScheme next_scheme();

  // Ingests one drawn batch; returns true once a termination rule holds.
  bool absorb(const BatchDraw& draw);

  bool finished() const { return finished_; }
  // Meaningful once finished() is true; reports the first rule that fired.
  TerminationReason reason() const { return reason_; }
  int upcoming_iteration() const { return history_.iterations() + 1; }

  LoopResult result() const;
  LoopResult run();

private:
  struct FitState {
    bool usable = false;
    double score = 0.0;
    bool attempted = false;
    SurrogateFit coordinate;    // mean-type characteristics
    EventOutcomeFit two_part;   // ratio of weighted totals
  };

  void refit_if_due(int iteration);
  std::optional<SamplingScheme> model_scheme() const;
  void estimate_after_batch();
  bool step_allowed() const;

  Eigen::MatrixXd auxiliaries_;
  Eigen::VectorXd prior_weights_;
  Characteristic characteristic_;
  LabelOracle oracle_;
  LoopConfig config_;

  SamplingScheme fallback_scheme_;
  Eigen::MatrixXd observed_;            // N x d, rows valid only once labeled
  std::map<int, LabelRecord> labeled_;  // ordered for reproducible fits
  SampleHistory history_;
  FitState fit_;
  RandomStream draw_stream_;

  bool finished_ = false;
  TerminationReason reason_ = TerminationReason::IterationLimit;
  std::vector<IterationTrace> trace_;
  PooledEstimate last_full_estimate_;
  bool have_full_estimate_ = false;
  bool last_used_fallback_ = false;
};

LoopResult run_active_sampling(Eigen::MatrixXd auxiliaries, Eigen::VectorXd prior_weights,
                               const Characteristic& characteristic, const LabelOracle& oracle,
                               const LoopConfig& config);

// Smallest n with pilot_variance / n <= delta^2.
long long pilot_sample_size(double pilot_variance, double precision_target);

}  // namespace actsamp

#endif
