#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lk {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: bad files, bad URIs, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Expression syntax error. `offset()` is the byte offset into the source text.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InputError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A function was evaluated outside its domain (log of a nonpositive value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Singular, indefinite or badly conditioned matrices.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or integrality checks that did not settle.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A structural check failed (e.g. a chart pair is not a Riemannian submersion).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace lk
