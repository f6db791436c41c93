#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "alocv/errors.hpp"
#include "alocv/penalty.hpp"
#include "alocv/rng.hpp"

using namespace alocv;

TEST_CASE("nu > 0 is required everywhere") {
  CHECK_THROWS_AS(ridge_penalty(0.0, 5), InvalidInput);
  CHECK_THROWS_AS(elastic_net_penalty(1.0, 0.0, 5), InvalidInput);
  CHECK_THROWS_AS(elastic_net_penalty(-1.0, 1.0, 5), InvalidInput);
  CHECK_THROWS_AS(
      group_lasso_penalty({{0, 1}}, Eigen::VectorXd::Constant(1, 1.0), 0.0, 5), InvalidInput);
}

TEST_CASE("groups must partition [p]") {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 1.0);
  CHECK_NOTHROW(group_lasso_penalty({{0, 1}, {2}}, w, 0.5, 5));
  CHECK_THROWS_AS(group_lasso_penalty({{0, 1}, {1, 2}}, w, 0.5, 5), InvalidInput);   // overlap
  CHECK_THROWS_AS(group_lasso_penalty({{0, 1}, {3}}, w, 0.5, 5), InvalidInput);      // gap
  PenaltySpec ok = group_lasso_penalty({{0, 1}, {2}}, w, 0.5, 5);
  CHECK_THROWS_AS(validate(ok, 4), InvalidInput);  // does not cover a 4-dim problem
}

TEST_CASE("soft threshold core") {
  CHECK(soft_threshold(3.0, 1.0) == doctest::Approx(2.0));
  CHECK(soft_threshold(-3.0, 1.0) == doctest::Approx(-2.0));
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
}

TEST_CASE("mu_eff uses the covariance operator norm") {
  CHECK(ridge_penalty(0.5, 10).mu_eff == doctest::Approx(0.5));
  CHECK(ridge_penalty(0.5, 10, 2.0).mu_eff == doctest::Approx(0.25));
  CHECK_THROWS_AS(ridge_penalty(0.5, 10, 0.0), InvalidInput);
}

TEST_CASE("penalty values and minimum at zero") {
  std::mt19937_64 rng = make_stream(77, 0);
  std::normal_distribution<double> draw(0.0, 1.0);
  Eigen::VectorXd b(4);
  for (Index j = 0; j < 4; ++j) b[j] = draw(rng);

  PenaltySpec ridge = ridge_penalty(0.5, 6);
  CHECK(ridge.value(b) == doctest::Approx(0.5 * 3.0 * b.squaredNorm()));

  PenaltySpec enet = elastic_net_penalty(1.5, 0.5, 6);
  CHECK(enet.value(b) == doctest::Approx(1.5 * b.lpNorm<1>() + 0.5 * 3.0 * b.squaredNorm()));

  Eigen::VectorXd gw(2);
  gw << 2.0, 0.5;
  PenaltySpec group = group_lasso_penalty({{0, 1}, {2, 3}}, gw, 0.5, 6);
  double expected = 2.0 * b.head(2).norm() + 0.5 * b.tail(2).norm() + 0.5 * 3.0 * b.squaredNorm();
  CHECK(group.value(b) == doctest::Approx(expected));

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  for (const PenaltySpec* p : {&ridge, &enet, &group}) {
    CHECK(p->value(zero) == 0.0);
    CHECK(p->value(b) >= 0.0);
  }
}
