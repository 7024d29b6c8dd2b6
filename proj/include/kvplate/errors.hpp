#pragma once

#include <stdexcept>

namespace kvplate {

/// Invalid user input: configuration values, grid requests, preconditions.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed or an algebraic invariant was violated.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace kvplate
