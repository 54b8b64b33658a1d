#include "actsamp/baselines.hpp"

#include "actsamp/errors.hpp"

namespace actsamp {

namespace {

struct SampleMoments {
  double n = 0.0, sy = 0.0, sz = 0.0, syz = 0.0, szz = 0.0;
};

SampleMoments moments(const BatchDraw& draw, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& z) {
  if (y.size() != draw.counts.size() || z.size() != draw.counts.size())
    throw ConfigError("draw and columns disagree on the population size");
  SampleMoments m;
  for (Eigen::Index i = 0; i < draw.counts.size(); ++i) {
    const double s = draw.counts[i];
    if (s == 0.0) continue;
    m.n += s;
    m.sy += s * y[i];
    m.sz += s * z[i];
    m.syz += s * y[i] * z[i];
    m.szz += s * z[i] * z[i];
  }
  if (m.n <= 0.0) throw ConfigError("the batch is empty");
  return m;
}

}  // namespace

double ratio_estimate(const BatchDraw& draw, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& z, double population_mean_z) {
  const SampleMoments m = moments(draw, y, z);
  if (m.sz == 0.0) throw DomainError("ratio estimate with zero auxiliary sample mean");
  return population_mean_z * m.sy / m.sz;
}

double control_variate_estimate(const BatchDraw& draw, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& z, double population_mean_z) {
  const SampleMoments m = moments(draw, y, z);
  const double ybar = m.sy / m.n;
  const double zbar = m.sz / m.n;
  const double szz_c = m.szz - m.n * zbar * zbar;
  const double syz_c = m.syz - m.n * ybar * zbar;
  const double beta = szz_c > 0.0 ? syz_c / szz_c : 0.0;
  return ybar + beta * (population_mean_z - zbar);
}

}  // namespace actsamp
