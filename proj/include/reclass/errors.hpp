#pragma once

#include <stdexcept>
#include <string>

namespace reclass {

/// Raised when an iterative routine cannot reach its target (no sign change,
/// divergence, overflow of a simulated quantity, zero denominators and the like).
/// Input validation failures use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File and parsing failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace reclass
