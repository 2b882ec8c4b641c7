#pragma once

#include <stdexcept>

namespace nqe {

// Error taxonomy shared across the toolkit. The CLI maps each category
// onto a distinct process exit code.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension or shape mismatch between operands.
class ShapeError : public Error {
  using Error::Error;
};

// Value outside the operation's domain (bad range, missing class, ...).
class DomainError : public Error {
  using Error::Error;
};

// Numeric failure: non-convergence or non-finite intermediate results.
class NumericError : public Error {
  using Error::Error;
};

// Malformed external file (IDX container, JSON schema, CSV row).
class FormatError : public Error {
  using Error::Error;
};

// Filesystem-level failure.
class IoError : public Error {
  using Error::Error;
};

// Invalid experiment configuration.
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace nqe
