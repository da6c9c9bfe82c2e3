#pragma once

#include <stdexcept>
#include <string>

namespace kerr {

// Operands live on Fock spaces (or datasets) of incompatible sizes.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An iterative numerical routine (eigensolver, root finder) failed to
// converge within its internal limits.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quadrature result changed by more than the accepted relative tolerance
// when the node count was doubled; the caller should retry with more nodes.
struct QuadratureUnderResolved : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A request exceeds a hard size limit (joint-space dimension, node cap, ...).
struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration (file contents or overrides).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kerr
