#pragma once

#include <string>

namespace alocv {

enum class LossFamily { Square, Huber, Logistic };

/// Convex per-observation loss t -> L_y(t) with first and second derivatives.
/// Square: (y-t)^2/2. Huber: rho(y-t) with quadratic core of half-width m.
/// Logistic: log(1+e^t) - y t for y in {0,1}. Second derivatives always lie
/// in [0,1] so the curvature diagonal stays a contraction.
struct LossSpec {
  LossFamily family = LossFamily::Square;
  double huber_m = 1.0;
  bool loss_lipschitz_1 = false;   // |L_y'| <= 1 everywhere
  bool deriv_lipschitz_1 = true;   // L_y'' <= 1 everywhere

  double value(double y, double t) const;
  double d1(double y, double t) const;
  double d2(double y, double t) const;

  /// Upper bound on d2 over all inputs; enters the solver step size.
  double d2_max() const;

  std::string name() const;
};

LossSpec square_loss();
LossSpec huber_loss(double m = 1.0);
LossSpec logistic_loss();

struct LossEval {
  double value;
  double d1;
  double d2;
};

/// Evaluates (L_y(t), L_y'(t), L_y''(t)); throws InvalidInput on non-finite t or y.
LossEval loss_eval(const LossSpec& loss, double y, double t);

enum class TestFunctionKind { SquaredError, AbsoluteError, LogisticDeviance, Misclassification };

/// Scalar error functional g(a, y) used to aggregate risk estimates.
struct TestFunction {
  TestFunctionKind kind = TestFunctionKind::SquaredError;
  double threshold = 0.5;       // misclassification cutoff on the predicted score
  bool growth_condition = true; // |g(x,y)-g(x',y)| <= |x-x'| (1+|x|+|x'|)

  double operator()(double a, double y) const;
  std::string name() const;
};

TestFunction squared_error();
TestFunction absolute_error();
TestFunction logistic_deviance();
TestFunction misclassification(double threshold = 0.5);

double test_function_eval(const TestFunction& g, double a, double y);

}  // namespace alocv
