#pragma once

#include <stdexcept>
#include <string>

namespace oddlink {

/// Malformed or unusable input (bad edge lists, bad flags, bad files).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical routine failed (non-convergence, domain violation).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oddlink
