#ifndef ACTSAMP_EXPERIMENT_HPP
#define ACTSAMP_EXPERIMENT_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "actsamp/active_loop.hpp"
#include "actsamp/application_grid.hpp"
#include "actsamp/synthetic.hpp"

namespace actsamp {

enum class Method {
  SrsLinear,
  SrsHajek,
  Ratio,
  ControlVariate,
  ImportanceAux,
  Leverage,
  Density,
  Severity,
  NaiveActive,
  Active
};

std::string method_name(Method method);
Method parse_method(const std::string& name);

struct ExperimentSpec {
  std::vector<Method> methods{Method::Active, Method::SrsLinear};
  CharacteristicKind characteristic = CharacteristicKind::LinearMean;
  SurrogateKind surrogate = SurrogateKind::KernelRidge;
  FallbackKind fallback = FallbackKind::Uniform;
  int batch_size = 10;
  int n_max = 250;
  int replications = 200;
  VarianceMethod variance_method = VarianceMethod::Design;
  int bootstrap_replicates = 500;
  double alpha = 0.05;
  double floor_epsilon = kDefaultFloorEpsilon;
  int min_fit_size = 10;
  int cv_folds = 5;
  int knn_neighbors = 5;
  int refit_every = 1;
  std::uint64_t seed = 0;
};

// Population handed to the runners: either a scalar response study or an
// event/outcome study, plus labels for the output table.
struct BenchmarkInput {
  std::string scenario_label;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd auxiliaries;
  Eigen::VectorXd prior_weights;
  Eigen::VectorXd scalar_response;
  Eigen::VectorXd event;
  Eigen::VectorXd outcome;

  bool is_event_outcome() const { return event.size() > 0; }
  int size() const { return static_cast<int>(auxiliaries.rows()); }
};

BenchmarkInput make_input(const SyntheticData& data, const SyntheticSpec& spec);
BenchmarkInput make_input(const ApplicationData& data);

struct ResultRow {
  std::string method;
  std::string scenario;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::string estimator;
  int batch_size = 0;
  int n = 0;
  int m_reps = 0;
  double ermse = std::numeric_limits<double>::quiet_NaN();
  double ermse_se = std::numeric_limits<double>::quiet_NaN();
  double coverage = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<std::string> metadata;  // written as trailing '#' lines
};

std::string csv_header();
void write_csv(const ResultTable& table, std::ostream& out);

// Replication-level estimates, one row per replication and one column per
// checkpoint sample size; NaN marks an undefined estimate.
struct MethodCurve {
  Method method;
  std::string label;
  Eigen::MatrixXd estimates;
};

struct BenchmarkOutcome {
  std::vector<int> checkpoints;
  double theta_true = 0.0;
  std::vector<MethodCurve> curves;
  ResultTable table;
};

// Empirical root mean squared error study across the configured methods with
// common random numbers per replication.
BenchmarkOutcome run_benchmark(const BenchmarkInput& input, const ExperimentSpec& spec);

struct CoverageCurve {
  std::string label;              // method plus variance estimator
  Eigen::MatrixXd covered;        // 1 = interval covers, 0 = misses, NaN = undefined
  Eigen::MatrixXd estimates;
};

struct CoverageOutcome {
  std::vector<int> checkpoints;
  double theta_true = 0.0;
  std::vector<CoverageCurve> curves;
  ResultTable table;
};

// Interval coverage study.  Fixed-scheme methods use the within-batch design
// variance; adaptive methods report design, between-batch and bootstrap
// variance intervals side by side from the same runs.
CoverageOutcome run_coverage(const BenchmarkInput& input, const ExperimentSpec& spec);

// Smallest checkpoint index from which the paired squared-error difference
// between the two curves is z-significant (|z| > 1.96) with a stable sign
// through the last checkpoint; -1 when there is none.
int persistent_significance_from(const Eigen::MatrixXd& estimates_a,
                                 const Eigen::MatrixXd& estimates_b, double theta_true);

}  // namespace actsamp

#endif
