#include "actsamp/schemes.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "actsamp/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace actsamp;

namespace {

Eigen::VectorXd floored(const Eigen::VectorXd& base, double eps) {
  const double n = static_cast<double>(base.size());
  return ((1.0 - eps) * base.array() + eps / n).matrix();
}

}  // namespace

TEST_CASE("from_probabilities validation") {
  Eigen::VectorXd ok(2);
  ok << 0.25, 0.75;
  CHECK(SamplingScheme::from_probabilities(ok).probabilities == ok);

  CHECK_THROWS_AS(SamplingScheme::from_probabilities(Eigen::VectorXd()), ConfigError);

  Eigen::VectorXd with_zero(2);
  with_zero << 0.0, 1.0;
  CHECK_THROWS_AS(SamplingScheme::from_probabilities(with_zero), DegenerateScheme);

  Eigen::VectorXd off_sum(2);
  off_sum << 0.25, 0.76;
  CHECK_THROWS_AS(SamplingScheme::from_probabilities(off_sum), ConfigError);

  Eigen::VectorXd with_nan(2);
  with_nan << 0.5, std::nan("");
  CHECK_THROWS_AS(SamplingScheme::from_probabilities(with_nan), ConfigError);
}

TEST_CASE("from_weights floors and pins the sum") {
  Eigen::VectorXd w(4);
  w << 0.0, 1.0, 2.0, 5.0;
  const double eps = kDefaultFloorEpsilon;
  const auto scheme = SamplingScheme::from_weights(w, eps);
  CHECK(scheme.probabilities.minCoeff() >= eps / 4.0);
  CHECK(std::abs(scheme.probabilities.sum() - 1.0) <= 1e-15);
  const Eigen::VectorXd expected = floored(w / w.sum(), eps);
  for (int i = 0; i < 4; ++i)
    CHECK(scheme.probabilities[i] == doctest::Approx(expected[i]).epsilon(1e-13));

  Eigen::VectorXd neg(2);
  neg << -1.0, 2.0;
  CHECK_THROWS_AS(SamplingScheme::from_weights(neg), ConfigError);
  CHECK_THROWS_AS(SamplingScheme::from_weights(Eigen::VectorXd::Zero(3)), DegenerateScheme);
  CHECK_THROWS_AS(SamplingScheme::from_weights(w, 1.5), ConfigError);
}

TEST_CASE("sqrt rule worked example and scale invariance") {
  Eigen::VectorXd c(2);
  c << 1.0, 9.0;
  const Eigen::VectorXd pi = sqrt_weight_rule(c);
  CHECK(pi[0] == 0.25);
  CHECK(pi[1] == 0.75);

  Eigen::VectorXd c4(4);
  c4 << 0.3, 2.0, 0.0, 7.5;
  const Eigen::VectorXd a = sqrt_weight_rule(c4);
  const Eigen::VectorXd b = sqrt_weight_rule(100.0 * c4);
  for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

  CHECK_THROWS_AS(sqrt_weight_rule(Eigen::VectorXd()), ConfigError);
  CHECK_THROWS_AS(sqrt_weight_rule(Eigen::VectorXd::Zero(2)), DegenerateScheme);
  Eigen::VectorXd neg(1);
  neg << -0.5;
  CHECK_THROWS_AS(sqrt_weight_rule(neg), ConfigError);
}

TEST_CASE("sqrt rule minimizes the weighted-total variance proxy") {
  // sum_i c_i / pi_i is minimized on the simplex at pi proportional to sqrt(c)
  RandomStream rng(11);
  Eigen::VectorXd c(5);
  for (int i = 0; i < 5; ++i) c[i] = 0.1 + rng.uniform() * 3.0;
  const Eigen::VectorXd star = sqrt_weight_rule(c);
  const double at_star = (c.array() / star.array()).sum();
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd alt(5);
    for (int i = 0; i < 5; ++i) alt[i] = 0.05 + rng.uniform();
    alt /= alt.sum();
    CHECK((c.array() / alt.array()).sum() >= at_star - 1e-10);
  }
}

TEST_CASE("multinomial draw basics") {
  Eigen::VectorXd p(3);
  p << 0.2, 0.3, 0.5;
  const auto scheme = SamplingScheme::from_probabilities(p);

  RandomStream a(99);
  RandomStream b(99);
  const auto da = draw_multinomial(scheme, 7, a);
  const auto db = draw_multinomial(scheme, 7, b);
  CHECK(da.counts == db.counts);
  CHECK(da.counts.sum() == 7);
  CHECK(da.batch_size == 7);
  CHECK(da.expected_counts == (7.0 * p));

  RandomStream c(1);
  CHECK_THROWS_AS(draw_multinomial(scheme, 0, c), ConfigError);
}

TEST_CASE("multinomial draw matches the exact distribution") {
  Eigen::VectorXd p(3);
  p << 0.2, 0.3, 0.5;
  const auto scheme = SamplingScheme::from_probabilities(p);
  const int n = 4;
  const auto outcomes = testsupport::enumerate_multinomial(p, n);

  const int reps = 20000;
  std::vector<int> hits(outcomes.size(), 0);
  RandomStream rng(2024);
  for (int r = 0; r < reps; ++r) {
    const auto draw = draw_multinomial(scheme, n, rng);
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
      if (outcomes[o].counts == draw.counts) {
        ++hits[o];
        break;
      }
    }
  }
  double total_prob = 0.0;
  for (std::size_t o = 0; o < outcomes.size(); ++o) {
    total_prob += outcomes[o].probability;
    const double expect = outcomes[o].probability;
    const double freq = static_cast<double>(hits[o]) / reps;
    const double se = std::sqrt(expect * (1.0 - expect) / reps);
    CHECK(std::abs(freq - expect) <= 5.0 * se + 1e-12);
  }
  CHECK(total_prob == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multinomial draw is distributionally permutation invariant") {
  Eigen::VectorXd p(3);
  p << 0.5, 0.3, 0.2;  // reversed order of the previous case
  const auto scheme = SamplingScheme::from_probabilities(p);
  const int n = 4;
  Eigen::VectorXd canonical(3);
  canonical << 0.2, 0.3, 0.5;
  const auto outcomes = testsupport::enumerate_multinomial(canonical, n);

  const int reps = 20000;
  std::vector<int> hits(outcomes.size(), 0);
  RandomStream rng(515);
  for (int r = 0; r < reps; ++r) {
    const auto draw = draw_multinomial(scheme, n, rng);
    Eigen::VectorXi mapped(3);  // undo the permutation
    mapped << draw.counts[2], draw.counts[1], draw.counts[0];
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
      if (outcomes[o].counts == mapped) {
        ++hits[o];
        break;
      }
    }
  }
  for (std::size_t o = 0; o < outcomes.size(); ++o) {
    const double expect = outcomes[o].probability;
    const double freq = static_cast<double>(hits[o]) / reps;
    const double se = std::sqrt(expect * (1.0 - expect) / reps);
    CHECK(std::abs(freq - expect) <= 5.0 * se + 1e-12);
  }
}

TEST_CASE("known-response optimal scheme") {
  Eigen::MatrixXd y(2, 1);
  y << 1.0, 3.0;
  Eigen::VectorXd grad(1);
  grad << 1.0;
  const double eps = kDefaultFloorEpsilon;
  const auto scheme = optimal_scheme_known(y, grad, eps);
  Eigen::VectorXd base(2);
  base << 0.25, 0.75;
  const Eigen::VectorXd expected = floored(base, eps);
  CHECK(scheme.probabilities[0] == doctest::Approx(expected[0]).epsilon(1e-13));
  CHECK(scheme.probabilities[1] == doctest::Approx(expected[1]).epsilon(1e-13));

  // mean-type gradient: scores proportional to |y - mean|
  Eigen::MatrixXd hajek(3, 2);
  hajek << 1.0, 1.0, 1.0, 2.0, 1.0, 6.0;
  Eigen::VectorXd g2(2);
  g2 << -3.0 / 3.0, 1.0 / 3.0;  // gradient of u2/u1 at (3, 9)
  const auto mean_scheme = optimal_scheme_known(hajek, g2, 0.0);
  CHECK(mean_scheme.probabilities[0] == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
  CHECK(mean_scheme.probabilities[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(mean_scheme.probabilities[2] == doctest::Approx(3.0 / 6.0).epsilon(1e-12));

  Eigen::VectorXd bad_grad(2);
  bad_grad << 1.0, 1.0;
  CHECK_THROWS_AS(optimal_scheme_known(y, bad_grad), ConfigError);
}

TEST_CASE("predictive scheme") {
  Eigen::VectorXd grad(1);
  grad << 1.0;

  SUBCASE("variance spreads the scheme toward the noisy element") {
    Eigen::MatrixXd eta(2, 1);
    eta << 1.0, 2.0;
    std::vector<Eigen::MatrixXd> covs{Eigen::MatrixXd::Constant(1, 1, 3.0),
                                      Eigen::MatrixXd::Zero(1, 1)};
    // scores (1 + 3, 4 + 0) are equal, so the scheme is uniform
    const auto scheme = optimal_scheme_predictive(eta, covs, grad, 0.0);
    CHECK(scheme.probabilities[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(scheme.probabilities[1] == doctest::Approx(0.5).epsilon(1e-14));
  }

  SUBCASE("zero covariances reproduce the known-response scheme bitwise") {
    Eigen::MatrixXd y(4, 1);
    y << 0.7, -1.3, 2.2, 0.05;
    std::vector<Eigen::MatrixXd> zeros(4, Eigen::MatrixXd::Zero(1, 1));
    const auto predictive = optimal_scheme_predictive(y, zeros, grad);
    const auto known = optimal_scheme_known(y, grad);
    CHECK(predictive.probabilities == known.probabilities);
  }

  SUBCASE("exploding variances interpolate to uniform") {
    Eigen::MatrixXd eta(3, 1);
    eta << 1.0, 2.0, 3.0;
    std::vector<Eigen::MatrixXd> covs(3, Eigen::MatrixXd::Constant(1, 1, 1e16));
    const auto scheme = optimal_scheme_predictive(eta, covs, grad, 0.0);
    const double tv = 0.5 * (scheme.probabilities.array() - 1.0 / 3.0).abs().sum();
    CHECK(tv < 1e-8);
  }

  SUBCASE("dimension checks") {
    Eigen::MatrixXd eta(2, 1);
    eta << 1.0, 2.0;
    std::vector<Eigen::MatrixXd> one_cov{Eigen::MatrixXd::Zero(1, 1)};
    CHECK_THROWS_AS(optimal_scheme_predictive(eta, one_cov, grad), ConfigError);
    std::vector<Eigen::MatrixXd> wrong_dim(2, Eigen::MatrixXd::Zero(2, 2));
    CHECK_THROWS_AS(optimal_scheme_predictive(eta, wrong_dim, grad), ConfigError);
  }
}

TEST_CASE("two-part ratio scheme") {
  Eigen::VectorXd p(2), r(2), x(2), sd(2);
  p << 2.0, 1.0;
  r << 1.0, 1.0;
  x << 5.0, 5.0;
  sd << 0.0, 0.0;
  // scores p^2 r ((x - theta)^2 + sd^2) = (16, 4) -> sqrt (4, 2)
  const auto scheme = two_part_ratio_scheme(p, r, x, sd, 3.0, 0.0);
  CHECK(scheme.probabilities[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(scheme.probabilities[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  CHECK_THROWS_AS(
      two_part_ratio_scheme(p, r, x, sd, std::numeric_limits<double>::quiet_NaN()),
      ConfigError);
  Eigen::VectorXd short_r(1);
  short_r << 1.0;
  CHECK_THROWS_AS(two_part_ratio_scheme(p, short_r, x, sd, 3.0), ConfigError);
}

TEST_CASE("baseline schemes") {
  Eigen::MatrixXd aux(4, 1);
  aux << 1.0, 2.0, 3.0, 4.0;
  Eigen::VectorXd prior(4);
  prior << 4.0, 3.0, 2.0, 1.0;
  const auto pop = Population::create(Eigen::MatrixXd::Zero(4, 1), aux, prior);
  const double eps = kDefaultFloorEpsilon;

  SUBCASE("uniform") {
    const auto scheme = baseline_scheme(BaselineKind::Uniform, pop, eps);
    for (int i = 0; i < 4; ++i)
      CHECK(scheme.probabilities[i] == doctest::Approx(0.25).epsilon(1e-14));
  }

  SUBCASE("proportional to the auxiliary") {
    const auto scheme = baseline_scheme(BaselineKind::ProportionalToAux, pop, 0.0);
    for (int i = 0; i < 4; ++i)
      CHECK(scheme.probabilities[i] == doctest::Approx((i + 1) / 10.0).epsilon(1e-13));

    Eigen::MatrixXd with_zero = aux;
    with_zero(0, 0) = 0.0;
    const auto bad = Population::create(Eigen::MatrixXd::Zero(4, 1), with_zero, prior);
    CHECK_THROWS_AS(baseline_scheme(BaselineKind::ProportionalToAux, bad, eps),
                    DegenerateScheme);
    CHECK_THROWS_AS(baseline_scheme(BaselineKind::ProportionalToAux, pop, eps, 3),
                    ConfigError);
  }

  SUBCASE("density follows the prior weights") {
    const auto scheme = baseline_scheme(BaselineKind::Density, pop, 0.0);
    for (int i = 0; i < 4; ++i)
      CHECK(scheme.probabilities[i] == doctest::Approx(prior[i] / 10.0).epsilon(1e-13));
  }

  SUBCASE("severity rescales each auxiliary onto [0.1, 1]") {
    Eigen::MatrixXd z(2, 1);
    z << 0.0, 1.0;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    const auto pop2 = Population::create(Eigen::MatrixXd::Zero(2, 1), z, ones);
    const auto scheme = baseline_scheme(BaselineKind::Severity, pop2, 0.0);
    CHECK(scheme.probabilities[0] == doctest::Approx(0.1 / 1.1).epsilon(1e-13));
    CHECK(scheme.probabilities[1] == doctest::Approx(1.0 / 1.1).epsilon(1e-13));

    // constant columns carry no information, so severity collapses to density
    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 1, 2.5);
    const auto pop3 = Population::create(Eigen::MatrixXd::Zero(4, 1), flat, prior);
    const auto severity = baseline_scheme(BaselineKind::Severity, pop3, eps);
    const auto density = baseline_scheme(BaselineKind::Density, pop3, eps);
    CHECK(severity.probabilities == density.probabilities);
  }

  SUBCASE("leverage on a saturated design is uniform") {
    Eigen::MatrixXd z(2, 1);
    z << 0.0, 1.0;
    const auto pop2 =
        Population::create(Eigen::MatrixXd::Zero(2, 1), z, Eigen::VectorXd::Ones(2));
    const auto scheme = baseline_scheme(BaselineKind::Leverage, pop2, 0.0);
    CHECK(scheme.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(scheme.probabilities[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("leverage scores match the weighted hat matrix") {
  Eigen::MatrixXd z(4, 1);
  z << 1.0, 2.0, 3.0, 4.0;
  Eigen::VectorXd w(4);
  w << 1.0, 1.0, 2.0, 2.0;

  const Eigen::VectorXd h = leverage_scores(z, w);

  Eigen::MatrixXd design(4, 2);
  design.col(0).setOnes();
  design.col(1) = z;
  const Eigen::MatrixXd xtwx =
      design.transpose() * w.asDiagonal() * design;
  const Eigen::MatrixXd inv = xtwx.inverse();
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd xi = design.row(i).transpose();
    CHECK(h[i] == doctest::Approx(w[i] * xi.dot(inv * xi)).epsilon(1e-10));
  }
  CHECK(h.sum() == doctest::Approx(2.0).epsilon(1e-10));  // trace of the hat matrix

  // unweighted case against the closed form 1/n + (z - mean)^2 / ss
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  const Eigen::VectorXd hu = leverage_scores(z, ones);
  const double mean = z.col(0).mean();
  const double ss = (z.col(0).array() - mean).square().sum();
  for (int i = 0; i < 4; ++i)
    CHECK(hu[i] == doctest::Approx(0.25 + std::pow(z(i, 0) - mean, 2) / ss).epsilon(1e-10));

  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(4, 1, 3.0);
  CHECK_THROWS_AS(leverage_scores(constant, ones), SingularDesign);
  Eigen::MatrixXd wide(1, 2);
  wide << 1.0, 2.0;
  Eigen::VectorXd w1 = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(leverage_scores(wide, w1), SingularDesign);
  Eigen::VectorXd nonpos(4);
  nonpos << 1.0, 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(leverage_scores(z, nonpos), ConfigError);
}

TEST_CASE("exact batch-total covariance") {
  Eigen::MatrixXd y(2, 1);
  y << 1.0, 3.0;
  Eigen::VectorXd p(2);
  p << 0.5, 0.5;
  const auto scheme = SamplingScheme::from_probabilities(p);
  CHECK(exact_hh_covariance(y, scheme, 1)(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(exact_hh_covariance(y, scheme, 2)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

  // vector-valued responses against plain loops
  RandomStream rng(3);
  Eigen::MatrixXd y2(5, 2);
  Eigen::VectorXd w(5);
  for (int i = 0; i < 5; ++i) {
    y2(i, 0) = rng.normal();
    y2(i, 1) = rng.normal();
    w[i] = 0.2 + rng.uniform();
  }
  const auto s2 = SamplingScheme::from_weights(w, 0.0);
  const int n = 3;
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  const Eigen::VectorXd t = y2.colwise().sum();
  for (int i = 0; i < 5; ++i)
    expected += y2.row(i).transpose() * y2.row(i) / s2.probabilities[i];
  expected = (expected - t * t.transpose()) / n;
  const Eigen::MatrixXd got = exact_hh_covariance(y2, s2, n);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      CHECK(got(a, b) == doctest::Approx(expected(a, b)).epsilon(1e-12));

  CHECK_THROWS_AS(exact_hh_covariance(y, scheme, 0), ConfigError);
  CHECK_THROWS_AS(exact_hh_covariance(y2, scheme, 1), ConfigError);
}
