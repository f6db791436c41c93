#include "alocv/loss.hpp"

#include <cmath>

#include "alocv/errors.hpp"

namespace alocv {

namespace {

double sigmoid(double t) {
  if (t >= 0) {
    double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + e^t) without overflow
double log1pexp(double t) {
  if (t > 30.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace

double LossSpec::value(double y, double t) const {
  switch (family) {
    case LossFamily::Square: {
      double r = y - t;
      return 0.5 * r * r;
    }
    case LossFamily::Huber: {
      double r = y - t;
      double a = std::abs(r);
      return a <= huber_m ? 0.5 * r * r : huber_m * a - 0.5 * huber_m * huber_m;
    }
    case LossFamily::Logistic:
      return log1pexp(t) - y * t;
  }
  return 0.0;
}

double LossSpec::d1(double y, double t) const {
  switch (family) {
    case LossFamily::Square:
      return t - y;
    case LossFamily::Huber: {
      double r = y - t;
      if (std::abs(r) <= huber_m) return -r;
      return r > 0 ? -huber_m : huber_m;
    }
    case LossFamily::Logistic:
      return sigmoid(t) - y;
  }
  return 0.0;
}

double LossSpec::d2(double y, double t) const {
  switch (family) {
    case LossFamily::Square:
      return 1.0;
    case LossFamily::Huber:
      return std::abs(y - t) <= huber_m ? 1.0 : 0.0;
    case LossFamily::Logistic: {
      double s = sigmoid(t);
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

double LossSpec::d2_max() const {
  return family == LossFamily::Logistic ? 0.25 : 1.0;
}

std::string LossSpec::name() const {
  switch (family) {
    case LossFamily::Square:
      return "square";
    case LossFamily::Huber:
      return "huber:" + std::to_string(huber_m);
    case LossFamily::Logistic:
      return "logistic";
  }
  return "?";
}

LossSpec square_loss() {
  LossSpec s;
  s.family = LossFamily::Square;
  s.loss_lipschitz_1 = false;  // derivative t - y is unbounded
  s.deriv_lipschitz_1 = true;
  return s;
}

LossSpec huber_loss(double m) {
  if (!(m > 0)) throw InvalidInput("huber threshold m must be > 0");
  LossSpec s;
  s.family = LossFamily::Huber;
  s.huber_m = m;
  s.loss_lipschitz_1 = m <= 1.0;  // |L'| <= m
  s.deriv_lipschitz_1 = true;
  return s;
}

LossSpec logistic_loss() {
  LossSpec s;
  s.family = LossFamily::Logistic;
  s.loss_lipschitz_1 = true;   // |sigmoid - y| <= 1
  s.deriv_lipschitz_1 = true;  // d2 <= 1/4
  return s;
}

LossEval loss_eval(const LossSpec& loss, double y, double t) {
  if (!std::isfinite(t) || !std::isfinite(y))
    throw InvalidInput("loss_eval: non-finite input");
  return {loss.value(y, t), loss.d1(y, t), loss.d2(y, t)};
}

double TestFunction::operator()(double a, double y) const {
  switch (kind) {
    case TestFunctionKind::SquaredError: {
      double r = a - y;
      return r * r;
    }
    case TestFunctionKind::AbsoluteError:
      return std::abs(a - y);
    case TestFunctionKind::LogisticDeviance:
      return log1pexp(a) - y * a;
    case TestFunctionKind::Misclassification: {
      double predicted = a > threshold ? 1.0 : 0.0;
      return predicted == y ? 0.0 : 1.0;
    }
  }
  return 0.0;
}

std::string TestFunction::name() const {
  switch (kind) {
    case TestFunctionKind::SquaredError:
      return "sq";
    case TestFunctionKind::AbsoluteError:
      return "abs";
    case TestFunctionKind::LogisticDeviance:
      return "dev";
    case TestFunctionKind::Misclassification:
      return "mis:" + std::to_string(threshold);
  }
  return "?";
}

TestFunction squared_error() { return {TestFunctionKind::SquaredError, 0.5, true}; }
TestFunction absolute_error() { return {TestFunctionKind::AbsoluteError, 0.5, true}; }
TestFunction logistic_deviance() { return {TestFunctionKind::LogisticDeviance, 0.5, true}; }
TestFunction misclassification(double threshold) {
  // indicator jumps violate the growth condition, so bound-based checks skip it
  return {TestFunctionKind::Misclassification, threshold, false};
}

double test_function_eval(const TestFunction& g, double a, double y) {
  if (!std::isfinite(a) || !std::isfinite(y))
    throw InvalidInput("test_function_eval: non-finite input");
  return g(a, y);
}

}  // namespace alocv
