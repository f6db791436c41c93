#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "alocv/errors.hpp"
#include "alocv/loss.hpp"
#include "alocv/rng.hpp"

using namespace alocv;

TEST_CASE("square loss values") {
  LossSpec loss = square_loss();
  LossEval e = loss_eval(loss, 3.0, 1.5);
  CHECK(e.value == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(e.d1 == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(e.d2 == 1.0);
}

TEST_CASE("huber branches") {
  LossSpec loss = huber_loss(1.0);
  LossEval quad = loss_eval(loss, 0.0, 0.5);
  CHECK(quad.d1 == doctest::Approx(0.5));
  CHECK(quad.d2 == 1.0);
  LossEval lin = loss_eval(loss, 0.0, 2.0);
  CHECK(lin.d1 == doctest::Approx(1.0));
  CHECK(lin.d2 == 0.0);
  CHECK_THROWS_AS(huber_loss(0.0), InvalidInput);
}

TEST_CASE("non-finite input rejected") {
  CHECK_THROWS_AS(loss_eval(square_loss(), 1.0, std::numeric_limits<double>::infinity()),
                  InvalidInput);
  CHECK_THROWS_AS(loss_eval(square_loss(), std::numeric_limits<double>::quiet_NaN(), 0.0),
                  InvalidInput);
}

TEST_CASE("lipschitz flags per family") {
  CHECK_FALSE(square_loss().loss_lipschitz_1);
  CHECK(square_loss().deriv_lipschitz_1);
  CHECK(huber_loss(1.0).loss_lipschitz_1);
  CHECK_FALSE(huber_loss(2.0).loss_lipschitz_1);
  CHECK(logistic_loss().loss_lipschitz_1);
  CHECK(logistic_loss().deriv_lipschitz_1);
}

TEST_CASE("derivatives and convexity at random probes") {
  std::mt19937_64 rng = make_stream(1234, 0);
  std::normal_distribution<double> draw(0.0, 2.0);
  std::vector<LossSpec> families = {square_loss(), huber_loss(1.0), huber_loss(1.7),
                                    logistic_loss()};
  for (const LossSpec& loss : families) {
    for (int t = 0; t < 1000; ++t) {
      double y = loss.family == LossFamily::Logistic ? (draw(rng) > 0 ? 1.0 : 0.0) : draw(rng);
      double x = draw(rng);
      LossEval e = loss_eval(loss, y, x);
      CHECK(e.d2 >= 0.0);
      CHECK(e.d2 <= 1.0);
      double h = 1e-7 * std::max(1.0, std::abs(x));
      double fd = (loss.value(y, x + h) - loss.value(y, x - h)) / (2 * h);
      CHECK(std::abs(fd - e.d1) <= 1e-6 * std::max(1.0, std::abs(e.d1)));
      double far = draw(rng);
      double mid = 0.5 * (x + far);
      CHECK(loss.value(y, mid) <=
            0.5 * (loss.value(y, x) + loss.value(y, far)) + 1e-10);
    }
  }
}

TEST_CASE("test function values") {
  CHECK(test_function_eval(squared_error(), 0.0, 3.0) == doctest::Approx(9.0));
  CHECK(test_function_eval(absolute_error(), 1.25, 1.25) == 0.0);
  CHECK(test_function_eval(misclassification(0.5), 0.7, 1.0) == 0.0);
  CHECK(test_function_eval(misclassification(0.5), 0.2, 1.0) == 1.0);
  double a = 0.3;
  CHECK(test_function_eval(logistic_deviance(), a, 1.0) ==
        doctest::Approx(std::log1p(std::exp(a)) - a));
}

TEST_CASE("growth condition flags") {
  CHECK(squared_error().growth_condition);
  CHECK(absolute_error().growth_condition);
  CHECK(logistic_deviance().growth_condition);
  CHECK_FALSE(misclassification().growth_condition);
}
