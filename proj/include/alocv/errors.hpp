#pragma once

#include <stdexcept>
#include <string>

namespace alocv {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidInput : Error {
  using Error::Error;
};

struct NonFiniteObjective : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct WrongLoss : Error {
  using Error::Error;
};

struct DegenerateLeverage : Error {
  using Error::Error;
};

struct DegenerateDenominator : Error {
  using Error::Error;
};

// Raised by finite-difference probes of non-smooth fits when the active set
// differs between the two perturbed refits.
struct SupportChanged : Error {
  using Error::Error;
};

}  // namespace alocv
