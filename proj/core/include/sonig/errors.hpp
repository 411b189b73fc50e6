#pragma once

#include <stdexcept>
#include <string>

namespace sonig {

// Invalid arguments or malformed data supplied by the caller.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown inside an otherwise valid computation
// (singular factorization, non finite values, lost positive definiteness).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sonig
