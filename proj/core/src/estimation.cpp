#include "actsamp/estimation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "actsamp/errors.hpp"

namespace actsamp {

int SampleHistory::total_draws() const {
  int m = 0;
  for (const auto& r : records) m += r.batch_size;
  return m;
}

Eigen::VectorXd hh_batch_total(const BatchDraw& draw, const Eigen::MatrixXd& responses) {
  if (responses.rows() != draw.counts.size())
    throw ConfigError("responses and draw disagree on the population size");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(responses.cols());
  for (Eigen::Index i = 0; i < draw.counts.size(); ++i) {
    const int s = draw.counts[i];
    if (s == 0) continue;
    total += (static_cast<double>(s) / draw.expected_counts[i]) * responses.row(i).transpose();
  }
  return total;
}

Eigen::VectorXd pool_totals(const SampleHistory& history) {
  if (history.records.empty()) throw ConfigError("cannot pool an empty history");
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(history.records.front().batch_total.size());
  for (const auto& r : history.records)
    pooled += static_cast<double>(r.batch_size) * r.batch_total;
  return pooled / static_cast<double>(history.total_draws());
}

Eigen::MatrixXd syg_batch_cov(const HistoryRecord& record, const Eigen::MatrixXd& responses) {
  const int n = record.batch_size;
  if (n < 2) throw BatchTooSmall("within-batch covariance needs at least two draws");
  const auto d = record.batch_total.size();
  const Eigen::VectorXd center = record.batch_total / static_cast<double>(n);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < record.counts.size(); ++i) {
    const int s = record.counts[i];
    if (s == 0) continue;
    const Eigen::VectorXd dev =
        responses.row(i).transpose() / record.expected_counts[i] - center;
    phi += static_cast<double>(s) * dev * dev.transpose();
  }
  return phi * (static_cast<double>(n) / static_cast<double>(n - 1));
}

Eigen::MatrixXd pooled_design_variance(const SampleHistory& history,
                                       const Eigen::MatrixXd& responses) {
  if (history.records.empty()) throw ConfigError("cannot pool an empty history");
  const auto d = history.records.front().batch_total.size();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < history.records.size(); ++k) {
    const auto& r = history.records[k];
    const double n = static_cast<double>(r.batch_size);
    try {
      psi += n * n * syg_batch_cov(r, responses);
    } catch (const BatchTooSmall&) {
      throw BatchTooSmall("iteration " + std::to_string(k + 1) +
                          " has fewer than two draws");
    }
  }
  const double m = static_cast<double>(history.total_draws());
  return psi / (m * m);
}

MartingaleCovariance martingale_variance(const SampleHistory& history) {
  if (history.records.empty()) throw ConfigError("cannot pool an empty history");
  const auto d = history.records.front().batch_total.size();
  MartingaleCovariance out;
  out.psi = Eigen::MatrixXd::Zero(d, d);
  out.sufficient = history.iterations() >= 2;
  if (!out.sufficient) return out;
  const Eigen::VectorXd pooled = pool_totals(history);
  for (const auto& r : history.records) {
    const double n = static_cast<double>(r.batch_size);
    const Eigen::VectorXd dev = r.batch_total - pooled;
    out.psi += n * n * dev * dev.transpose();
  }
  const double m = static_cast<double>(history.total_draws());
  out.psi /= m * m;
  return out;
}

Eigen::MatrixXd bootstrap_variance(const SampleHistory& history,
                                   const Eigen::MatrixXd& responses, int replicates,
                                   RandomStream& rng) {
  if (replicates < 2) throw ConfigError("bootstrap needs at least two replicates");
  if (history.records.empty()) throw ConfigError("cannot bootstrap an empty history");
  const auto d = history.records.front().batch_total.size();
  const int m = history.total_draws();

  // Augmented dataset: one record per selection, carrying n_j * y_i / mu_ji
  // so a replicate pooled total is just the mean of m resampled rows.
  Eigen::MatrixXd contributions(m, d);
  int row = 0;
  for (const auto& r : history.records) {
    const double n = static_cast<double>(r.batch_size);
    for (Eigen::Index i = 0; i < r.counts.size(); ++i) {
      const int s = r.counts[i];
      if (s == 0) continue;
      const Eigen::RowVectorXd value =
          (n / r.expected_counts[i]) * responses.row(i);
      for (int c = 0; c < s; ++c) contributions.row(row++) = value;
    }
  }

  Eigen::MatrixXd replicate_totals(replicates, d);
  for (int b = 0; b < replicates; ++b) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (int r = 0; r < m; ++r)
      acc += contributions.row(static_cast<Eigen::Index>(rng.uniform_below(m)));
    replicate_totals.row(b) = acc / static_cast<double>(m);
  }

  const Eigen::RowVectorXd mean = replicate_totals.colwise().mean();
  const Eigen::MatrixXd centered = replicate_totals.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(replicates - 1);
}

double delta_variance(const Characteristic& characteristic,
                      const Eigen::VectorXd& pooled_totals, const Eigen::MatrixXd& psi) {
  const Eigen::VectorXd grad = characteristic.gradient(pooled_totals);
  if (psi.rows() != grad.size() || psi.cols() != grad.size())
    throw ConfigError("covariance dimension does not match the characteristic");
  const double v = grad.dot(psi * grad);
  if (v < 0.0) {
    if (-v < 1e-12 * psi.norm()) return 0.0;
    throw ConfigError("covariance produced a substantially negative variance");
  }
  return v;
}

std::pair<double, double> confidence_interval(double theta_hat, double variance_hat,
                                              double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (variance_hat < 0.0) throw ConfigError("variance must be nonnegative");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(variance_hat);
  return {theta_hat - half, theta_hat + half};
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Rational approximation for the inverse normal CDF (Acklam), accurate to
// about 1e-9 on its own; refined below.
double inverse_cdf_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile argument must lie in (0, 1)");
  // Work on the lower half only: 1 - p is exact there and the erfc-based cdf
  // keeps full relative accuracy, while cdf(x) - p cancels in the upper tail.
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = inverse_cdf_seed(p);
  // Two Halley steps polish the seed to full double precision.
  for (int it = 0; it < 2; ++it) {
    const double e = normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace actsamp
