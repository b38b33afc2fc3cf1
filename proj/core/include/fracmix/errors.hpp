#pragma once

#include <stdexcept>
#include <string>

namespace fracmix {

// Error taxonomy shared by all modules. Callers that only care about
// "did it work" can catch Error; the CLI maps ConfigError/DomainError to
// exit code 1 and the numerical-budget failures to exit code 2.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration (unsupported family/rank, bad grid parameters).
struct ConfigError : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Exhaustive search refused (search space above the declared cap).
struct CapacityError : Error {
  using Error::Error;
};

// Grid too coarse for the requested stencil or cutoff sweep.
struct ResolutionError : Error {
  using Error::Error;
};

// Requested bracket/window not found in the scanned range.
struct RangeError : Error {
  using Error::Error;
};

// Quadrature or truncation budget exceeded; message carries the achieved bound.
struct AccuracyError : Error {
  using Error::Error;
};

// Resampling pushed mass past the truncation radius beyond the loss budget.
struct TruncationError : Error {
  using Error::Error;
};

}  // namespace fracmix
