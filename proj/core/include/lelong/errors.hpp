#pragma once

#include <stdexcept>
#include <string>

namespace lelong {

/// Malformed or out-of-range user input (bad spec, invalid radius, non-psh current).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine did not reach its requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lelong
