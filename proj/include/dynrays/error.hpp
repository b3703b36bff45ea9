#ifndef DYNRAYS_ERROR_HPP
#define DYNRAYS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dynrays {

/// Base of every library error. Numerical failures and usage errors are
/// kept apart so the CLI can map them onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (angles, addresses, complex pairs, config keys).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Point outside the region where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inverse branch requested on (or too close to) its cut.
class BranchError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iteration blew past the representable range, or a solver diverged.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dynrays

#endif  // DYNRAYS_ERROR_HPP
