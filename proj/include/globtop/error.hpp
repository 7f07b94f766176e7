#pragma once

#include <stdexcept>
#include <string>

namespace globtop {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input value lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configuration or data file is malformed or violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (singular system, non-finite assembly, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace globtop
