#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrelax {

// Configuration / precondition problems surfaced to the CLI as exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Density reached zero (or went non-finite) at a grid point; carries where and when.
struct VacuumError : std::runtime_error {
  double time;
  std::size_t index;
  VacuumError(double t, std::size_t i, const std::string& what_arg)
      : std::runtime_error(what_arg), time(t), index(i) {}
};

// The stability-limited time step fell below dt_min.
struct StiffnessError : std::runtime_error {
  double time;
  StiffnessError(double t, const std::string& what_arg) : std::runtime_error(what_arg), time(t) {}
};

// Adaptive quadrature failed to converge within its panel budget.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Decay fit had no usable window.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mrelax
