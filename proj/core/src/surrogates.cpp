#include "actsamp/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "actsamp/errors.hpp"
#include "actsamp/random.hpp"

namespace actsamp {
namespace {

using Predictor = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;
using Maker = std::function<Predictor(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean).array().rowwise() / scale.array();
  }
};

Standardizer make_standardizer(const Eigen::MatrixXd& x) {
  Standardizer s;
  s.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean;
  s.scale = (centered.array().square().colwise().sum() / std::max<double>(1.0, x.rows() - 1))
                .sqrt();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j)
    if (s.scale[j] <= 0.0) s.scale[j] = 1.0;
  return s;
}

Predictor fit_linear(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const auto m = x.rows();
  const auto p = x.cols() + 1;
  Eigen::MatrixXd design(m, p);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) throw FitFailed("least squares design is rank deficient");
  Eigen::MatrixXd coef = qr.solve(y);
  return [coef](const Eigen::MatrixXd& q) {
    Eigen::MatrixXd design_q(q.rows(), coef.rows());
    design_q.col(0).setOnes();
    design_q.rightCols(q.cols()) = q;
    return Eigen::MatrixXd(design_q * coef);
  };
}

Predictor fit_knn(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int k) {
  const int m = static_cast<int>(x.rows());
  k = std::clamp(k, 1, m);
  return [x, y, k](const Eigen::MatrixXd& q) {
    Eigen::MatrixXd out(q.rows(), y.cols());
    std::vector<int> order(x.rows());
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      const Eigen::VectorXd dist2 =
          (x.rowwise() - q.row(r)).array().square().rowwise().sum();
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + k, order.end(),
                        [&](int a, int b) {
                          // Ties break on the training row index so the
                          // neighbor set is reproducible.
                          if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
                          return a < b;
                        });
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(y.cols());
      for (int t = 0; t < k; ++t) acc += y.row(order[t]);
      out.row(r) = acc / static_cast<double>(k);
    }
    return out;
  };
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return d2.cwiseMax(0.0);
}

Predictor fit_kernel_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           double bandwidth, double ridge) {
  const auto m = x.rows();
  const double inv = -0.5 / (bandwidth * bandwidth);
  Eigen::MatrixXd gram = (squared_distances(x, x) * inv).array().exp();
  gram.diagonal().array() += ridge * static_cast<double>(m);
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  Eigen::MatrixXd alpha;
  if (llt.info() == Eigen::Success) {
    alpha = llt.solve(y.rowwise() - y_mean);
  } else {
    alpha = gram.ldlt().solve(y.rowwise() - y_mean);
  }
  return [x, alpha, y_mean, inv](const Eigen::MatrixXd& q) {
    const Eigen::MatrixXd cross = (squared_distances(q, x) * inv).array().exp();
    return Eigen::MatrixXd((cross * alpha).rowwise() + y_mean);
  };
}

double median_pairwise_distance(const Eigen::MatrixXd& x) {
  const auto m = x.rows();
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      d.push_back((x.row(i) - x.row(j)).norm());
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + d.size() / 2;
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

struct CvOutcome {
  double score = 0.0;
  Eigen::VectorXd residual_second_moment;  // per coordinate
};

std::vector<int> fold_assignment(int m, int folds, std::uint64_t fold_seed) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  RandomStream rng(mix64(fold_seed ^ 0xF01DULL));
  for (int i = m - 1; i > 0; --i)
    std::swap(perm[i], perm[static_cast<int>(rng.uniform_below(i + 1))]);
  std::vector<int> fold(m);
  for (int t = 0; t < m; ++t) fold[perm[t]] = t % folds;
  return fold;
}

// Out-of-fold predictions for every labeled row; throws FitFailed when any
// fold's training fit fails.
CvOutcome cross_validate(const Maker& maker, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y, int folds, std::uint64_t fold_seed) {
  const int m = static_cast<int>(x.rows());
  if (m < 2) throw FitFailed("too few points for cross validation");
  folds = std::clamp(folds, 2, m);
  const std::vector<int> fold = fold_assignment(m, folds, fold_seed);

  Eigen::MatrixXd oof(m, y.cols());
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < m; ++i) (fold[i] == f ? test : train).push_back(i);
    if (train.empty() || test.empty()) continue;
    Eigen::MatrixXd xt(train.size(), x.cols()), yt(train.size(), y.cols());
    for (std::size_t r = 0; r < train.size(); ++r) {
      xt.row(r) = x.row(train[r]);
      yt.row(r) = y.row(train[r]);
    }
    Eigen::MatrixXd xq(test.size(), x.cols());
    for (std::size_t r = 0; r < test.size(); ++r) xq.row(r) = x.row(test[r]);
    const Eigen::MatrixXd pred = maker(xt, yt)(xq);
    for (std::size_t r = 0; r < test.size(); ++r) oof.row(test[r]) = pred.row(r);
  }

  const Eigen::MatrixXd residuals = y - oof;
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Eigen::MatrixXd centered = y.rowwise() - y_mean;

  CvOutcome out;
  out.residual_second_moment = residuals.array().square().colwise().mean();
  double ss_res = 0.0, ss_tot = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double tot = centered.col(j).squaredNorm();
    if (tot <= 0.0) continue;  // constant coordinate carries no score signal
    ss_tot += tot;
    ss_res += residuals.col(j).squaredNorm();
  }
  out.score = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return out;
}

struct CorePlan {
  Maker maker;
  CvOutcome cv;
};

// Chooses the model (including kernel ridge hyperparameters via the shared
// folds) and computes its cross-validation outcome.
CorePlan plan_fit(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& y,
                  const SurrogateConfig& cfg) {
  switch (cfg.kind) {
    case SurrogateKind::LinearLS: {
      Maker maker = [](const Eigen::MatrixXd& xt, const Eigen::MatrixXd& yt) {
        return fit_linear(xt, yt);
      };
      CvOutcome cv = cross_validate(maker, xs, y, cfg.cv_folds, cfg.fold_seed);
      return {std::move(maker), std::move(cv)};
    }
    case SurrogateKind::KNearest: {
      const int k = cfg.knn_neighbors;
      Maker maker = [k](const Eigen::MatrixXd& xt, const Eigen::MatrixXd& yt) {
        return fit_knn(xt, yt, k);
      };
      CvOutcome cv = cross_validate(maker, xs, y, cfg.cv_folds, cfg.fold_seed);
      return {std::move(maker), std::move(cv)};
    }
    case SurrogateKind::KernelRidge: {
      if (cfg.bandwidth_grid.empty() || cfg.ridge_grid.empty())
        throw ConfigError("kernel ridge grids must be non-empty");
      const double base = median_pairwise_distance(xs);
      bool found = false;
      CorePlan best;
      for (double bw_mult : cfg.bandwidth_grid) {
        for (double ridge : cfg.ridge_grid) {
          const double bw = bw_mult * base;
          Maker maker = [bw, ridge](const Eigen::MatrixXd& xt, const Eigen::MatrixXd& yt) {
            return fit_kernel_ridge(xt, yt, bw, ridge);
          };
          CvOutcome cv;
          try {
            cv = cross_validate(maker, xs, y, cfg.cv_folds, cfg.fold_seed);
          } catch (const FitFailed&) {
            continue;
          }
          if (!found || cv.score > best.cv.score) {
            best = {std::move(maker), std::move(cv)};
            found = true;
          }
        }
      }
      if (!found) throw FitFailed("no kernel ridge hyperparameters could be fitted");
      return best;
    }
  }
  throw ConfigError("unknown surrogate kind");
}

Eigen::VectorXd variance_floor(const Eigen::MatrixXd& y, double scale) {
  Eigen::VectorXd floor(y.cols());
  const Eigen::RowVectorXd mean = y.colwise().mean();
  const double denom = std::max<double>(1.0, y.rows() - 1);
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double var = (y.col(j).array() - mean[j]).square().sum() / denom;
    floor[j] = scale * (var > 0.0 ? var : 1.0);
  }
  return floor;
}

void check_fit_preconditions(const LabeledSet& labeled, const Eigen::MatrixXd& all_aux,
                             const SurrogateConfig& cfg) {
  if (labeled.size() < cfg.min_fit_size)
    throw FitFailed("labeled set below the minimum fit size");
  if (all_aux.cols() != labeled.auxiliaries.cols())
    throw ConfigError("labeled and population auxiliaries disagree on dimension");
}

}  // namespace

LabeledSet LabeledSet::create(std::vector<int> indices, Eigen::MatrixXd responses,
                              Eigen::MatrixXd auxiliaries) {
  const auto m = static_cast<Eigen::Index>(indices.size());
  if (responses.rows() != m || auxiliaries.rows() != m)
    throw ConfigError("labeled blocks disagree on the number of rows");
  for (std::size_t i = 1; i < indices.size(); ++i)
    if (indices[i] <= indices[i - 1])
      throw ConfigError("labeled indices must be sorted and unique");
  return LabeledSet{std::move(indices), std::move(responses), std::move(auxiliaries)};
}

SurrogateFit fit_surrogate(const LabeledSet& labeled, const Eigen::MatrixXd& all_auxiliaries,
                           const SurrogateConfig& config) {
  check_fit_preconditions(labeled, all_auxiliaries, config);

  const Standardizer std_aux = make_standardizer(labeled.auxiliaries);
  const Eigen::MatrixXd xs = std_aux.apply(labeled.auxiliaries);
  const CorePlan plan = plan_fit(xs, labeled.responses, config);

  Eigen::MatrixXd means = plan.maker(xs, labeled.responses)(std_aux.apply(all_auxiliaries));
  if (config.clamp_unit_interval)
    means = means.cwiseMax(1e-6).cwiseMin(1.0 - 1e-6);

  const Eigen::VectorXd floor = variance_floor(labeled.responses, config.variance_floor_scale);
  Eigen::MatrixXd sigma =
      plan.cv.residual_second_moment.cwiseMax(floor).asDiagonal();

  SurrogateFit fit;
  fit.predicted_means = std::move(means);
  fit.residual_covariances.assign(all_auxiliaries.rows(), sigma);
  fit.holdout_score = plan.cv.score;
  fit.success = plan.cv.score > 0.0;
  return fit;
}

std::vector<Eigen::MatrixXd> cv_residual_covariance(const LabeledSet& labeled,
                                                    int population_size,
                                                    const SurrogateConfig& config) {
  if (population_size < 1) throw ConfigError("population size must be positive");
  if (labeled.size() < config.min_fit_size)
    throw FitFailed("labeled set below the minimum fit size");
  const Standardizer std_aux = make_standardizer(labeled.auxiliaries);
  const CorePlan plan = plan_fit(std_aux.apply(labeled.auxiliaries), labeled.responses, config);
  const Eigen::VectorXd floor = variance_floor(labeled.responses, config.variance_floor_scale);
  const Eigen::MatrixXd sigma =
      plan.cv.residual_second_moment.cwiseMax(floor).asDiagonal();
  return std::vector<Eigen::MatrixXd>(population_size, sigma);
}

EventOutcomeFit fit_event_outcome(const LabeledSet& labeled,
                                  const Eigen::MatrixXd& all_auxiliaries,
                                  const SurrogateConfig& config) {
  if (labeled.responses.cols() != 2)
    throw ConfigError("two part fit expects (event, outcome) response columns");
  check_fit_preconditions(labeled, all_auxiliaries, config);

  // Event probability model on all labeled rows, clamped into (0, 1).
  SurrogateConfig event_cfg = config;
  event_cfg.clamp_unit_interval = true;
  const LabeledSet event_set = LabeledSet::create(
      labeled.indices, labeled.responses.col(0), labeled.auxiliaries);
  const SurrogateFit event_fit = fit_surrogate(event_set, all_auxiliaries, event_cfg);

  // Outcome model on the event cases only.
  std::vector<int> case_rows;
  for (int r = 0; r < labeled.size(); ++r)
    if (labeled.responses(r, 0) > 0.5) case_rows.push_back(r);
  if (static_cast<int>(case_rows.size()) < config.min_fit_size)
    throw FitFailed("too few event cases for the outcome model");
  std::vector<int> case_indices(case_rows.size());
  Eigen::MatrixXd case_y(case_rows.size(), 1);
  Eigen::MatrixXd case_aux(case_rows.size(), labeled.auxiliaries.cols());
  for (std::size_t r = 0; r < case_rows.size(); ++r) {
    case_indices[r] = labeled.indices[case_rows[r]];
    case_y(r, 0) = labeled.responses(case_rows[r], 1);
    case_aux.row(r) = labeled.auxiliaries.row(case_rows[r]);
  }
  const LabeledSet outcome_set =
      LabeledSet::create(std::move(case_indices), std::move(case_y), std::move(case_aux));
  const SurrogateFit outcome_fit = fit_surrogate(outcome_set, all_auxiliaries, config);

  EventOutcomeFit fit;
  fit.event_probability = event_fit.predicted_means.col(0);
  fit.outcome_mean = outcome_fit.predicted_means.col(0);
  fit.outcome_sd = Eigen::VectorXd::Constant(
      all_auxiliaries.rows(), std::sqrt(outcome_fit.residual_covariances.front()(0, 0)));
  fit.holdout_score = std::min(event_fit.holdout_score, outcome_fit.holdout_score);
  fit.success = event_fit.success && outcome_fit.success;
  return fit;
}

}  // namespace actsamp
