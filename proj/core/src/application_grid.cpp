#include "actsamp/application_grid.hpp"

#include <cmath>

#include "actsamp/errors.hpp"

namespace actsamp {

namespace {

double event_threshold(double v) { return 0.18 + 0.5 * v * v + 0.08 * std::sin(3.0 * v); }

double outcome_surface(double u, double v) {
  const double margin = u - event_threshold(v);
  return 40.0 * margin * (1.0 - 0.45 * v) +
         5.0 * (1.0 + std::sin(5.0 * u) * std::cos(3.0 * v));
}

double prior_surface(double u, double v) {
  const double dv = v - 0.35;
  return (0.25 + std::exp(-2.0 * u)) * (0.3 + std::exp(-dv * dv / 0.18));
}

}  // namespace

ApplicationData generate_application_grid(const ApplicationGridSpec& spec) {
  if (spec.primary_levels < 2 || spec.secondary_levels < 2)
    throw ConfigError("grid needs at least two levels per input");

  const int n = spec.primary_levels * spec.secondary_levels;
  ApplicationData data;
  data.auxiliaries.resize(n, 3);
  data.prior_weights.resize(n);
  data.event.resize(n);
  data.outcome.resize(n);

  int row = 0;
  for (int a = 0; a < spec.primary_levels; ++a) {
    const double u = (a + 1.0) / spec.primary_levels;
    for (int b = 0; b < spec.secondary_levels; ++b) {
      const double v = (b + 1.0) / spec.secondary_levels;
      data.auxiliaries(row, 0) = u;
      data.auxiliaries(row, 1) = v;
      data.auxiliaries(row, 2) = outcome_surface(1.0, v);
      data.prior_weights[row] = prior_surface(u, v);
      data.event[row] = u > event_threshold(v) ? 1.0 : 0.0;
      data.outcome[row] = outcome_surface(u, v);
      ++row;
    }
  }

  const double denom = data.prior_weights.dot(data.event);
  if (denom <= 0.0) throw DomainError("the grid contains no events, the target is undefined");
  data.theta_true =
      (data.prior_weights.array() * data.event.array() * data.outcome.array()).sum() / denom;
  return data;
}

}  // namespace actsamp
