#include "actsamp/characteristics.hpp"

#include <cmath>

#include "actsamp/errors.hpp"
#include "actsamp/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace actsamp;

TEST_CASE("factory dimensions") {
  CHECK(Characteristic::linear_total().dimension() == 1);
  CHECK(Characteristic::linear_mean(10).dimension() == 1);
  CHECK(Characteristic::hajek_mean().dimension() == 2);
  CHECK(Characteristic::ratio_of_weighted_totals().dimension() == 2);
  CHECK(Characteristic::linear_total().kind() == CharacteristicKind::LinearTotal);
  CHECK_THROWS_AS(Characteristic::linear_mean(0), ConfigError);
}

TEST_CASE("linear values and gradients") {
  Eigen::VectorXd u(1);
  u << 6.0;
  CHECK(Characteristic::linear_total().value(u) == 6.0);
  CHECK(Characteristic::linear_total().gradient(u)[0] == 1.0);
  CHECK(Characteristic::linear_mean(4).value(u) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(Characteristic::linear_mean(4).gradient(u)[0] == doctest::Approx(0.25));
}

TEST_CASE("ratio value and gradient at (2, 6)") {
  Eigen::VectorXd u(2);
  u << 2.0, 6.0;
  for (auto c : {Characteristic::hajek_mean(), Characteristic::ratio_of_weighted_totals()}) {
    CHECK(c.value(u) == doctest::Approx(3.0).epsilon(1e-15));
    const Eigen::VectorXd g = c.gradient(u);
    CHECK(g[0] == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("ratio kinds reject a zero denominator") {
  Eigen::VectorXd u(2);
  u << 0.0, 6.0;
  const auto c = Characteristic::hajek_mean();
  CHECK_THROWS_AS(c.value(u), DomainError);
  CHECK_THROWS_AS(c.gradient(u), DomainError);
}

TEST_CASE("dimension mismatch is a configuration error") {
  Eigen::VectorXd u(2);
  u << 1.0, 2.0;
  CHECK_THROWS_AS(Characteristic::linear_total().value(u), ConfigError);
  Eigen::VectorXd v(1);
  v << 1.0;
  CHECK_THROWS_AS(Characteristic::hajek_mean().gradient(v), ConfigError);
}

TEST_CASE("gradients agree with central differences") {
  RandomStream rng(42);
  auto check_grad = [&](const Characteristic& c) {
    for (int rep = 0; rep < 25; ++rep) {
      Eigen::VectorXd u(c.dimension());
      for (int j = 0; j < c.dimension(); ++j) u[j] = 0.5 + rng.uniform() * 4.0;
      const Eigen::VectorXd g = c.gradient(u);
      const Eigen::VectorXd fd = testsupport::numerical_gradient(
          [&](const Eigen::VectorXd& x) { return c.value(x); }, u);
      for (int j = 0; j < c.dimension(); ++j)
        CHECK(g[j] == doctest::Approx(fd[j]).epsilon(1e-6));
    }
  };
  check_grad(Characteristic::linear_total());
  check_grad(Characteristic::linear_mean(7));
  check_grad(Characteristic::hajek_mean());
  check_grad(Characteristic::ratio_of_weighted_totals());
}

TEST_CASE("scalar response mapping") {
  Eigen::VectorXd y(3);
  y << 1.0, 4.0, 9.0;

  SUBCASE("linear kinds keep one column") {
    const Eigen::MatrixXd m = map_scalar_responses(CharacteristicKind::LinearMean, y);
    REQUIRE(m.cols() == 1);
    CHECK(m.col(0) == y);
  }
  SUBCASE("hajek prepends the count column") {
    const Eigen::MatrixXd m = map_scalar_responses(CharacteristicKind::HajekMean, y);
    REQUIRE(m.cols() == 2);
    CHECK(m.col(0) == Eigen::VectorXd::Ones(3));
    CHECK(m.col(1) == y);
  }
  SUBCASE("event-outcome kind needs the other mapping") {
    CHECK_THROWS_AS(map_scalar_responses(CharacteristicKind::RatioOfWeightedTotals, y),
                    ConfigError);
  }
}

TEST_CASE("event-outcome mapping and the resulting ratio") {
  Eigen::VectorXd p(3), r(3), x(3);
  p << 1.0, 1.0, 1.0;
  r << 1.0, 1.0, 0.0;
  x << 2.0, 4.0, 9.0;
  const Eigen::MatrixXd m = map_event_outcome_responses(p, r, x);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 2.0);
  CHECK(m(2, 0) == 0.0);
  CHECK(m(2, 1) == 0.0);
  const Eigen::VectorXd totals = m.colwise().sum();
  // only the two event rows contribute: (2, 6) -> 3
  CHECK(Characteristic::ratio_of_weighted_totals().value(totals) == doctest::Approx(3.0));

  Eigen::VectorXd short_r(2);
  short_r << 1.0, 0.0;
  CHECK_THROWS_AS(map_event_outcome_responses(p, short_r, x), ConfigError);
}

TEST_CASE("true totals sum the mapped responses") {
  Eigen::VectorXd p(2), r(2), x(2);
  p << 0.5, 0.5;
  r << 1.0, 0.0;
  x << 4.0, 9.0;
  const Eigen::MatrixXd mapped = map_event_outcome_responses(p, r, x);
  const auto pop = Population::create(mapped, Eigen::MatrixXd::Zero(2, 1), p);
  const auto c = Characteristic::ratio_of_weighted_totals();
  const Eigen::VectorXd t = true_totals(pop, c);
  REQUIRE(t.size() == 2);
  CHECK(t[0] == doctest::Approx(0.5));
  CHECK(t[1] == doctest::Approx(2.0));
  CHECK(c.value(t) == doctest::Approx(4.0));

  // dimension mismatch between population and characteristic
  Eigen::MatrixXd one_col = Eigen::MatrixXd::Ones(2, 1);
  const auto scalar_pop = Population::create(one_col, Eigen::MatrixXd::Zero(2, 1));
  CHECK_THROWS_AS(true_totals(scalar_pop, c), ConfigError);
}

TEST_CASE("hajek mean equals linear mean at the true totals") {
  RandomStream rng(7);
  Eigen::VectorXd y(20);
  for (int i = 0; i < y.size(); ++i) y[i] = rng.normal();
  const Eigen::MatrixXd hajek = map_scalar_responses(CharacteristicKind::HajekMean, y);
  const Eigen::VectorXd t2 = hajek.colwise().sum();
  Eigen::VectorXd t1(1);
  t1 << y.sum();
  CHECK(Characteristic::hajek_mean().value(t2) ==
        doctest::Approx(Characteristic::linear_mean(20).value(t1)).epsilon(1e-12));
  CHECK(Characteristic::hajek_mean().value(t2) == doctest::Approx(y.mean()).epsilon(1e-12));
}
