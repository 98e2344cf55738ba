#pragma once

#include <stdexcept>
#include <string>

namespace chaining {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files (bad syntax, wrong counts, negative entries).
struct FormatError : Error {
  using Error::Error;
};

// Structurally well-formed input that violates a semantic requirement
// (triangle inequality, non-probability weights, invalid tree labels).
struct ValidationError : Error {
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Instance exceeds a hard size cap (exhaustive oracles only).
struct SizeError : Error {
  using Error::Error;
};

// A certified inequality failed; message names the inequality and the
// instance hash.
struct CertificateError : Error {
  using Error::Error;
};

}  // namespace chaining
