#include "actsamp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "actsamp/baselines.hpp"
#include "actsamp/errors.hpp"
#include "actsamp/population.hpp"

namespace actsamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_active(Method m) { return m == Method::Active || m == Method::NaiveActive; }

Characteristic make_characteristic(CharacteristicKind kind, int population_size) {
  switch (kind) {
    case CharacteristicKind::LinearTotal: return Characteristic::linear_total();
    case CharacteristicKind::LinearMean: return Characteristic::linear_mean(population_size);
    case CharacteristicKind::HajekMean: return Characteristic::hajek_mean();
    case CharacteristicKind::RatioOfWeightedTotals:
      return Characteristic::ratio_of_weighted_totals();
  }
  throw ConfigError("unknown characteristic kind");
}

std::string characteristic_label(CharacteristicKind kind) {
  switch (kind) {
    case CharacteristicKind::LinearTotal: return "hh-total";
    case CharacteristicKind::LinearMean: return "hh-mean";
    case CharacteristicKind::HajekMean: return "hajek";
    case CharacteristicKind::RatioOfWeightedTotals: return "ratio-totals";
  }
  return "?";
}

BaselineKind fixed_scheme_kind(Method m) {
  switch (m) {
    case Method::SrsLinear:
    case Method::SrsHajek:
    case Method::Ratio:
    case Method::ControlVariate: return BaselineKind::Uniform;
    case Method::ImportanceAux: return BaselineKind::ProportionalToAux;
    case Method::Leverage: return BaselineKind::Leverage;
    case Method::Density: return BaselineKind::Density;
    case Method::Severity: return BaselineKind::Severity;
    default: throw ConfigError("not a fixed-scheme method");
  }
}

struct Prepared {
  Eigen::MatrixXd mapped;  // response mapping for the study characteristic
  Characteristic characteristic;
  double theta_true = 0.0;
  Population pop;
  int checkpoint_count = 0;
  std::vector<int> checkpoints;
};

Prepared prepare(const BenchmarkInput& input, const ExperimentSpec& spec) {
  if (spec.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (spec.n_max < spec.batch_size) throw ConfigError("n_max below batch_size");
  if (spec.replications < 1) throw ConfigError("replications must be positive");
  if (spec.methods.empty()) throw ConfigError("no methods selected");
  const int n = input.size();
  if (n < 1) throw ConfigError("empty population");

  CharacteristicKind kind = spec.characteristic;
  if (input.is_event_outcome()) {
    if (kind != CharacteristicKind::RatioOfWeightedTotals)
      throw ConfigError("event/outcome input requires the ratio of weighted totals");
  } else {
    if (kind == CharacteristicKind::RatioOfWeightedTotals)
      throw ConfigError("ratio of weighted totals requires event/outcome input");
    if (input.scalar_response.size() != n) throw ConfigError("scalar response size mismatch");
  }

  Prepared prep{Eigen::MatrixXd(), make_characteristic(kind, n), 0.0,
                Population::create(Eigen::MatrixXd::Zero(n, 1), input.auxiliaries,
                                   input.prior_weights),
                0, {}};
  if (input.is_event_outcome())
    prep.mapped = map_event_outcome_responses(input.prior_weights, input.event, input.outcome);
  else
    prep.mapped = map_scalar_responses(kind, input.scalar_response);
  prep.pop = Population::create(prep.mapped, input.auxiliaries, input.prior_weights);
  prep.theta_true = prep.characteristic.value(true_totals(prep.pop, prep.characteristic));

  prep.checkpoint_count = spec.n_max / spec.batch_size;
  for (int k = 1; k <= prep.checkpoint_count; ++k)
    prep.checkpoints.push_back(k * spec.batch_size);
  return prep;
}

void check_method_allowed(Method m, const BenchmarkInput& input) {
  if (!input.is_event_outcome()) return;
  if (m == Method::Ratio || m == Method::ControlVariate || m == Method::SrsHajek)
    throw ConfigError(method_name(m) + " needs a scalar response study");
}

// Everything a fixed-scheme method needs, built once and reused by every
// replication so the scheme itself is common across methods and reps.
struct FixedPlan {
  Method method;
  SamplingScheme scheme;
  Eigen::MatrixXd mapped;  // response mapping for this method's estimator
  Characteristic characteristic;
  bool ratio_style = false;
  bool cv_style = false;
  double scale = 1.0;  // lifts the mean estimate to a total when needed
  std::string estimator;
};

FixedPlan make_fixed_plan(Method m, const BenchmarkInput& input, const ExperimentSpec& spec,
                          const Prepared& prep) {
  FixedPlan plan{m, baseline_scheme(fixed_scheme_kind(m), prep.pop, spec.floor_epsilon),
                 Eigen::MatrixXd(), prep.characteristic, false, false, 1.0, ""};
  const int n = input.size();
  if (m == Method::Ratio || m == Method::ControlVariate) {
    plan.ratio_style = (m == Method::Ratio);
    plan.cv_style = (m == Method::ControlVariate);
    plan.scale = spec.characteristic == CharacteristicKind::LinearTotal ? double(n) : 1.0;
    plan.estimator = plan.ratio_style ? "ratio" : "control-variate";
    return plan;
  }
  if (input.is_event_outcome()) {
    plan.mapped = prep.mapped;
    plan.estimator = characteristic_label(CharacteristicKind::RatioOfWeightedTotals);
    return plan;
  }
  CharacteristicKind kind = spec.characteristic;
  if (m == Method::SrsHajek) kind = CharacteristicKind::HajekMean;
  if (m == Method::SrsLinear && kind == CharacteristicKind::HajekMean)
    kind = CharacteristicKind::LinearMean;
  plan.characteristic = make_characteristic(kind, n);
  plan.mapped = map_scalar_responses(kind, input.scalar_response);
  plan.estimator = characteristic_label(kind);
  return plan;
}

// One replication of a fixed-scheme method; writes the estimate path into the
// given row of the estimates matrix, one entry per checkpoint.
void run_fixed_rep(const FixedPlan& plan, const BenchmarkInput& input, const ExperimentSpec& spec,
                   const Prepared& prep, RandomStream stream, Eigen::MatrixXd& estimates,
                   int rep) {
  const int big_n = input.size();
  Eigen::VectorXi cum = Eigen::VectorXi::Zero(big_n);
  const bool moments = plan.ratio_style || plan.cv_style;
  const double zbar = moments ? input.auxiliaries.col(0).mean() : 0.0;
  SampleHistory history;

  for (int k = 0; k < prep.checkpoint_count; ++k) {
    BatchDraw draw = draw_multinomial(plan.scheme, spec.batch_size, stream);
    const int n = prep.checkpoints[size_t(k)];
    double est = kNaN;
    if (moments) {
      cum += draw.counts;
      BatchDraw pooled{cum, n, plan.scheme.probabilities * double(n)};
      try {
        est = plan.ratio_style
                  ? plan.scale * ratio_estimate(pooled, input.scalar_response,
                                                input.auxiliaries.col(0), zbar)
                  : plan.scale * control_variate_estimate(pooled, input.scalar_response,
                                                          input.auxiliaries.col(0), zbar);
      } catch (const DomainError&) {
      }
    } else {
      // Same pooled Hansen-Hurwitz arithmetic as the adaptive sampler, so a
      // degenerate adaptive run reproduces the fixed curve bit for bit.
      history.records.push_back(HistoryRecord{draw.batch_size, draw.counts,
                                              draw.expected_counts,
                                              hh_batch_total(draw, plan.mapped)});
      try {
        est = plan.characteristic.value(pool_totals(history));
      } catch (const DomainError&) {
      }
    }
    estimates(rep, k) = est;
  }
}

LoopConfig make_loop_config(Method m, const ExperimentSpec& spec, const Prepared& prep,
                            const RandomStream& rep_stream) {
  LoopConfig cfg;
  cfg.batch_sizes.assign(size_t(prep.checkpoint_count), spec.batch_size);
  cfg.precision_target = std::numeric_limits<double>::min();
  cfg.surrogate.kind = spec.surrogate;
  cfg.surrogate.min_fit_size = spec.min_fit_size;
  cfg.surrogate.cv_folds = spec.cv_folds;
  cfg.surrogate.knn_neighbors = spec.knn_neighbors;
  cfg.surrogate.fold_seed = mix64(rep_stream.seed() ^ 0xF01D5EEDULL);
  cfg.refit_every = spec.refit_every;
  cfg.variance_method = spec.variance_method;
  cfg.naive_mode = (m == Method::NaiveActive);
  cfg.fallback = spec.fallback;
  cfg.alpha = spec.alpha;
  cfg.floor_epsilon = spec.floor_epsilon;
  cfg.bootstrap_replicates = spec.bootstrap_replicates;
  cfg.seed = rep_stream.seed();
  return cfg;
}

// Steps the sampler through its whole iteration budget, past any precision
// stop, so every checkpoint gets a live estimate.  The external stream mirrors
// the sampler's internal one, keeping paths identical to run().
LoopResult drive_full_budget(const BenchmarkInput& input, const Characteristic& characteristic,
                             const LabelOracle& oracle, const LoopConfig& cfg) {
  ActiveSampler sampler(input.auxiliaries, input.prior_weights, characteristic, oracle, cfg);
  RandomStream stream = RandomStream(cfg.seed).split(1);
  for (int batch : cfg.batch_sizes) {
    sampler.absorb(draw_multinomial(sampler.next_scheme(), batch, stream));
    if (sampler.finished() && sampler.reason() == TerminationReason::OracleFailure) break;
  }
  return sampler.result();
}

LabelOracle make_oracle(const BenchmarkInput& input, const Eigen::MatrixXd& mapped) {
  if (input.is_event_outcome()) {
    return [&input, &mapped](int i) {
      LabelRecord rec;
      rec.mapped = mapped.row(i).transpose();
      rec.raw = Eigen::Vector2d(input.event(i), input.outcome(i));
      return rec;
    };
  }
  return [&input, &mapped](int i) {
    LabelRecord rec;
    rec.mapped = mapped.row(i).transpose();
    rec.raw = Eigen::VectorXd::Constant(1, input.scalar_response(i));
    return rec;
  };
}

void fill_active_estimates(const LoopResult& result, Eigen::MatrixXd& estimates, int rep) {
  const int cols = int(estimates.cols());
  double carry = kNaN;
  size_t traced = result.trace.size();
  for (int k = 0; k < cols; ++k) {
    if (size_t(k) < traced) {
      const IterationTrace& t = result.trace[size_t(k)];
      carry = t.theta_defined ? t.theta_hat : kNaN;
    }
    estimates(rep, k) = carry;
  }
}

struct ColumnError {
  int m = 0;
  double ermse = kNaN;
  double ermse_se = kNaN;
};

ColumnError column_error(const Eigen::MatrixXd& estimates, int col, double theta_true) {
  std::vector<double> sq;
  sq.reserve(size_t(estimates.rows()));
  for (int r = 0; r < estimates.rows(); ++r) {
    const double e = estimates(r, col);
    if (std::isfinite(e)) sq.push_back((e - theta_true) * (e - theta_true));
  }
  ColumnError out;
  out.m = int(sq.size());
  if (out.m == 0) return out;
  double mse = 0.0;
  for (double v : sq) mse += v;
  mse /= out.m;
  out.ermse = std::sqrt(mse);
  if (out.m > 1 && out.ermse > 0.0) {
    double var = 0.0;
    for (double v : sq) var += (v - mse) * (v - mse);
    var /= (out.m - 1);
    out.ermse_se = std::sqrt(var / out.m) / (2.0 * out.ermse);
  } else {
    out.ermse_se = 0.0;
  }
  return out;
}

ResultRow base_row(const BenchmarkInput& input, const ExperimentSpec& spec) {
  ResultRow row;
  row.scenario = input.scenario_label;
  row.sigma = input.sigma;
  row.r2 = input.r2;
  row.batch_size = spec.batch_size;
  row.seed = spec.seed;
  return row;
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::SrsLinear: return "SRS-linear";
    case Method::SrsHajek: return "SRS-Hajek";
    case Method::Ratio: return "Ratio";
    case Method::ControlVariate: return "ControlVariate";
    case Method::ImportanceAux: return "ImportanceAux";
    case Method::Leverage: return "Leverage";
    case Method::Density: return "Density";
    case Method::Severity: return "Severity";
    case Method::NaiveActive: return "NaiveAS";
    case Method::Active: return "AS";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  static const std::map<std::string, Method> table = {
      {"SRS-linear", Method::SrsLinear},   {"SRS-Hajek", Method::SrsHajek},
      {"Ratio", Method::Ratio},            {"ControlVariate", Method::ControlVariate},
      {"ImportanceAux", Method::ImportanceAux}, {"Leverage", Method::Leverage},
      {"Density", Method::Density},        {"Severity", Method::Severity},
      {"NaiveAS", Method::NaiveActive},    {"AS", Method::Active}};
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown method: " + name);
  return it->second;
}

BenchmarkInput make_input(const SyntheticData& data, const SyntheticSpec& spec) {
  BenchmarkInput input;
  input.scenario_label =
      spec.scenario == Scenario::StrictlyPositive ? "positive" : "zero-mean";
  input.sigma = spec.kernel_bandwidth;
  input.r2 = spec.target_r2;
  input.auxiliaries = data.z;
  input.prior_weights = Eigen::VectorXd::Ones(data.z.size());
  input.scalar_response = data.y;
  return input;
}

BenchmarkInput make_input(const ApplicationData& data) {
  BenchmarkInput input;
  input.scenario_label = "application";
  input.auxiliaries = data.auxiliaries;
  input.prior_weights = data.prior_weights;
  input.event = data.event;
  input.outcome = data.outcome;
  return input;
}

std::string csv_header() {
  return "method,scenario,sigma,r2,estimator,batch_size,n,m_reps,ermse,ermse_se,coverage,seed";
}

void write_csv(const ResultTable& table, std::ostream& out) {
  out << csv_header() << '\n';
  for (const ResultRow& row : table.rows) {
    out << row.method << ',' << row.scenario << ',' << fmt_double(row.sigma) << ','
        << fmt_double(row.r2) << ',' << row.estimator << ',' << row.batch_size << ','
        << row.n << ',' << row.m_reps << ',' << fmt_double(row.ermse) << ','
        << fmt_double(row.ermse_se) << ',' << fmt_double(row.coverage) << ',' << row.seed
        << '\n';
  }
  for (const std::string& line : table.metadata) out << "# " << line << '\n';
}

BenchmarkOutcome run_benchmark(const BenchmarkInput& input, const ExperimentSpec& spec) {
  Prepared prep = prepare(input, spec);
  for (Method m : spec.methods) check_method_allowed(m, input);

  const int reps = spec.replications;
  const int cols = prep.checkpoint_count;

  std::vector<FixedPlan> fixed_plans;
  std::vector<int> plan_of_method(spec.methods.size(), -1);
  for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
    if (!is_active(spec.methods[mi])) {
      plan_of_method[mi] = int(fixed_plans.size());
      fixed_plans.push_back(make_fixed_plan(spec.methods[mi], input, spec, prep));
    }
  }

  BenchmarkOutcome out;
  out.checkpoints = prep.checkpoints;
  out.theta_true = prep.theta_true;
  for (Method m : spec.methods)
    out.curves.push_back(
        {m, method_name(m), Eigen::MatrixXd::Constant(reps, cols, kNaN)});

  LabelOracle oracle = make_oracle(input, prep.mapped);

  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rep_stream = RandomStream(spec.seed).split(std::uint64_t(rep));
    for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
      Method m = spec.methods[mi];
      if (is_active(m)) {
        LoopConfig cfg = make_loop_config(m, spec, prep, rep_stream);
        LoopResult result = drive_full_budget(input, prep.characteristic, oracle, cfg);
        fill_active_estimates(result, out.curves[mi].estimates, rep);
      } else {
        run_fixed_rep(fixed_plans[size_t(plan_of_method[mi])], input, spec, prep,
                      rep_stream.split(1), out.curves[mi].estimates, rep);
      }
    }
  }

  for (size_t mi = 0; mi < out.curves.size(); ++mi) {
    const MethodCurve& curve = out.curves[mi];
    std::string estimator =
        is_active(curve.method)
            ? characteristic_label(input.is_event_outcome()
                                       ? CharacteristicKind::RatioOfWeightedTotals
                                       : spec.characteristic)
            : fixed_plans[size_t(plan_of_method[mi])].estimator;
    for (int k = 0; k < cols; ++k) {
      ColumnError ce = column_error(curve.estimates, k, prep.theta_true);
      ResultRow row = base_row(input, spec);
      row.method = curve.label;
      row.estimator = estimator;
      row.n = prep.checkpoints[size_t(k)];
      row.m_reps = ce.m;
      row.ermse = ce.ermse;
      row.ermse_se = ce.ermse_se;
      out.table.rows.push_back(row);
    }
  }

  if (out.curves.size() >= 2 && reps >= 2) {
    for (size_t mi = 1; mi < out.curves.size(); ++mi) {
      const int from = persistent_significance_from(out.curves[mi].estimates,
                                                    out.curves[0].estimates, prep.theta_true);
      std::string line = "persistent-significance " + out.curves[mi].label + " vs " +
                         out.curves[0].label + ": ";
      if (from < 0) {
        line += "none";
      } else {
        // Sign of the pooled squared error difference at the onset checkpoint.
        double diff = 0.0;
        int m = 0;
        for (int r = 0; r < reps; ++r) {
          const double a = out.curves[mi].estimates(r, from);
          const double b = out.curves[0].estimates(r, from);
          if (std::isfinite(a) && std::isfinite(b)) {
            diff += (a - prep.theta_true) * (a - prep.theta_true) -
                    (b - prep.theta_true) * (b - prep.theta_true);
            ++m;
          }
        }
        line += "from n=" + std::to_string(prep.checkpoints[size_t(from)]) +
                ", lower=" + (diff < 0.0 ? out.curves[mi].label : out.curves[0].label);
      }
      out.table.metadata.push_back(line);
    }
  }
  return out;
}

int persistent_significance_from(const Eigen::MatrixXd& estimates_a,
                                 const Eigen::MatrixXd& estimates_b, double theta_true) {
  const int cols = int(estimates_a.cols());
  if (estimates_b.cols() != cols || estimates_b.rows() != estimates_a.rows() || cols == 0)
    return -1;
  int from = -1;
  double tail_sign = 0.0;
  for (int k = cols - 1; k >= 0; --k) {
    std::vector<double> diffs;
    for (int r = 0; r < estimates_a.rows(); ++r) {
      const double a = estimates_a(r, k);
      const double b = estimates_b(r, k);
      if (std::isfinite(a) && std::isfinite(b))
        diffs.push_back((a - theta_true) * (a - theta_true) -
                        (b - theta_true) * (b - theta_true));
    }
    if (diffs.size() < 2) break;
    double mean = 0.0;
    for (double v : diffs) mean += v;
    mean /= double(diffs.size());
    double var = 0.0;
    for (double v : diffs) var += (v - mean) * (v - mean);
    var /= double(diffs.size() - 1);
    const double se = std::sqrt(var / double(diffs.size()));
    bool significant;
    if (se == 0.0)
      significant = mean != 0.0;
    else
      significant = std::abs(mean) / se > 1.96;
    if (!significant || mean == 0.0) break;
    const double sign = mean > 0.0 ? 1.0 : -1.0;
    if (tail_sign == 0.0) tail_sign = sign;
    if (sign != tail_sign) break;
    from = k;
  }
  return from;
}

CoverageOutcome run_coverage(const BenchmarkInput& input, const ExperimentSpec& spec) {
  Prepared prep = prepare(input, spec);
  for (Method m : spec.methods) {
    check_method_allowed(m, input);
    if (m == Method::Ratio || m == Method::ControlVariate)
      throw ConfigError(method_name(m) + " has no interval estimator here");
  }

  const int reps = spec.replications;
  const int cols = prep.checkpoint_count;

  struct Slot {
    Method method;
    VarianceMethod variance;
    int plan = -1;  // fixed plan index, -1 for adaptive methods
  };
  std::vector<Slot> slots;
  std::vector<FixedPlan> fixed_plans;
  CoverageOutcome out;
  out.checkpoints = prep.checkpoints;
  out.theta_true = prep.theta_true;
  for (Method m : spec.methods) {
    if (is_active(m)) {
      for (VarianceMethod v :
           {VarianceMethod::Design, VarianceMethod::Martingale, VarianceMethod::Bootstrap}) {
        const char* suffix = v == VarianceMethod::Design       ? "-design"
                             : v == VarianceMethod::Martingale ? "-martingale"
                                                                : "-bootstrap";
        slots.push_back({m, v, -1});
        out.curves.push_back({method_name(m) + suffix,
                              Eigen::MatrixXd::Constant(reps, cols, kNaN),
                              Eigen::MatrixXd::Constant(reps, cols, kNaN)});
      }
    } else {
      slots.push_back({m, VarianceMethod::Design, int(fixed_plans.size())});
      fixed_plans.push_back(make_fixed_plan(m, input, spec, prep));
      out.curves.push_back({method_name(m), Eigen::MatrixXd::Constant(reps, cols, kNaN),
                            Eigen::MatrixXd::Constant(reps, cols, kNaN)});
    }
  }

  LabelOracle oracle = make_oracle(input, prep.mapped);

  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rep_stream = RandomStream(spec.seed).split(std::uint64_t(rep));
    size_t slot = 0;
    while (slot < slots.size()) {
      Method m = slots[slot].method;
      if (slots[slot].plan >= 0) {
        // Fixed scheme: one growing batch, design variance interval.
        const FixedPlan& plan = fixed_plans[size_t(slots[slot].plan)];
        RandomStream stream = rep_stream.split(1);
        const int big_n = input.size();
        Eigen::VectorXd weighted_sum = Eigen::VectorXd::Zero(plan.mapped.cols());
        Eigen::VectorXi cum = Eigen::VectorXi::Zero(big_n);
        for (int k = 0; k < cols; ++k) {
          BatchDraw draw = draw_multinomial(plan.scheme, spec.batch_size, stream);
          cum += draw.counts;
          for (int i = 0; i < big_n; ++i) {
            const int c = draw.counts(i);
            if (c > 0)
              weighted_sum += (double(c) / plan.scheme.probabilities(i)) *
                              plan.mapped.row(i).transpose();
          }
          const int n = prep.checkpoints[size_t(k)];
          Eigen::VectorXd pooled = weighted_sum / double(n);
          HistoryRecord record{n, cum, plan.scheme.probabilities * double(n), pooled};
          try {
            const double theta = plan.characteristic.value(pooled);
            out.curves[slot].estimates(rep, k) = theta;
            Eigen::MatrixXd phi = syg_batch_cov(record, plan.mapped);
            const double var = delta_variance(plan.characteristic, pooled, phi);
            auto ci = confidence_interval(theta, var, spec.alpha);
            out.curves[slot].covered(rep, k) =
                (prep.theta_true >= ci.first && prep.theta_true <= ci.second) ? 1.0 : 0.0;
          } catch (const Error&) {
          }
        }
        ++slot;
      } else {
        // Adaptive: one run feeds the three variance flavors.
        LoopConfig cfg = make_loop_config(m, spec, prep, rep_stream);
        cfg.variance_method = VarianceMethod::Design;
        LoopResult result = drive_full_budget(input, prep.characteristic, oracle, cfg);
        SampleHistory prefix;
        double carry_theta[3] = {kNaN, kNaN, kNaN};
        double carry_cov[3] = {kNaN, kNaN, kNaN};
        for (int k = 0; k < cols; ++k) {
          if (size_t(k) < result.history.records.size()) {
            prefix.records.push_back(result.history.records[size_t(k)]);
            Eigen::VectorXd pooled = pool_totals(prefix);
            double theta = kNaN;
            Eigen::VectorXd grad;
            try {
              theta = prep.characteristic.value(pooled);
              grad = prep.characteristic.gradient(pooled);
            } catch (const DomainError&) {
            }
            for (int v = 0; v < 3; ++v) {
              carry_theta[v] = theta;
              carry_cov[v] = kNaN;
            }
            if (std::isfinite(theta)) {
              for (int v = 0; v < 3; ++v) {
                Eigen::MatrixXd psi;
                bool have = true;
                try {
                  if (v == 0) {
                    psi = pooled_design_variance(prefix, prep.mapped);
                  } else if (v == 1) {
                    MartingaleCovariance mc = martingale_variance(prefix);
                    have = mc.sufficient;
                    psi = mc.psi;
                  } else {
                    RandomStream boot =
                        rep_stream.split(0xB00Du).split(std::uint64_t(k));
                    psi = bootstrap_variance(prefix, prep.mapped,
                                             spec.bootstrap_replicates, boot);
                  }
                  if (have) {
                    const double var = delta_variance(prep.characteristic, pooled, psi);
                    auto ci = confidence_interval(theta, var, spec.alpha);
                    carry_cov[v] =
                        (prep.theta_true >= ci.first && prep.theta_true <= ci.second) ? 1.0
                                                                                      : 0.0;
                  }
                } catch (const Error&) {
                }
              }
            }
          }
          for (int v = 0; v < 3; ++v) {
            out.curves[slot + size_t(v)].estimates(rep, k) = carry_theta[v];
            out.curves[slot + size_t(v)].covered(rep, k) = carry_cov[v];
          }
        }
        slot += 3;
      }
    }
  }

  size_t slot = 0;
  for (const Slot& s : slots) {
    const CoverageCurve& curve = out.curves[slot];
    std::string estimator =
        s.plan >= 0 ? fixed_plans[size_t(s.plan)].estimator
                    : characteristic_label(input.is_event_outcome()
                                               ? CharacteristicKind::RatioOfWeightedTotals
                                               : spec.characteristic);
    for (int k = 0; k < cols; ++k) {
      ColumnError ce = column_error(curve.estimates, k, prep.theta_true);
      int covered = 0;
      int defined = 0;
      for (int r = 0; r < reps; ++r) {
        const double c = curve.covered(r, k);
        if (std::isfinite(c)) {
          ++defined;
          if (c > 0.5) ++covered;
        }
      }
      ResultRow row = base_row(input, spec);
      row.method = curve.label;
      row.estimator = estimator;
      row.n = prep.checkpoints[size_t(k)];
      row.m_reps = defined;
      row.ermse = ce.ermse;
      row.ermse_se = ce.ermse_se;
      if (defined > 0) row.coverage = double(covered) / double(defined);
      out.table.rows.push_back(row);
    }
    ++slot;
  }
  out.table.metadata.push_back("coverage intervals use alpha=" + fmt_double(spec.alpha));
  return out;
}

}  // namespace actsamp
