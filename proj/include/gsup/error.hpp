#pragma once

#include <stdexcept>
#include <string>

namespace gsup {

/// Argument outside the mathematical domain of an operation (q >= 1 + 2/p, s <= 0, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Shapes that do not line up: vector length vs dimension, label lengths, ranks.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input data that cannot be processed, e.g. NaN or infinite entries.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gsup
