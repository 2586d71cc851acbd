#pragma once

#include <stdexcept>

namespace ffdigits {

// Thrown when an enumeration or expansion would exceed its configured
// budget.  The message carries the estimated cost so callers can report it.
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a mathematical identity that must hold for every valid input
// fails.  This always indicates a bug in the library, never bad user input.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace ffdigits
