#pragma once

#include <stdexcept>

namespace gbm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data: bad matrices, bad parameter orderings.
struct ValidationError : Error {
  using Error::Error;
};
struct NonPositiveEntry final : ValidationError {
  using ValidationError::ValidationError;
};
struct NonFiniteEntry final : ValidationError {
  using ValidationError::ValidationError;
};
struct RaggedMatrix final : ValidationError {
  using ValidationError::ValidationError;
};
struct OrderingViolation final : ValidationError {
  using ValidationError::ValidationError;
};

struct WrongMachineCount final : Error {
  using Error::Error;
};
struct ScriptLengthMismatch final : Error {
  using Error::Error;
};
struct RatioMismatch final : Error {
  using Error::Error;
};

// Requests beyond the exact-enumeration caps or outside the certified
// parameter region. The CLI maps these to exit code 2.
struct TooLarge final : Error {
  using Error::Error;
};
struct InfeasibleParameters final : Error {
  using Error::Error;
};
struct EmptyFeasibleRegion final : Error {
  using Error::Error;
};

}  // namespace gbm
