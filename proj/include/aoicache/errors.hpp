#pragma once

#include <stdexcept>
#include <string>

namespace aoicache {

/// Invalid scenario, hyperparameter or tensor-shape configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// API used out of order (e.g. backward without a recorded forward pass).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite loss or gradient encountered during training.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Joint action space too large to enumerate (DQN output layer).
class IntractableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoicache
