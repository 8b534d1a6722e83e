#pragma once

#include <stdexcept>

namespace sca {

/// Non-finite cost or gradient, or a matrix that cannot be inverted.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LineSearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sca
