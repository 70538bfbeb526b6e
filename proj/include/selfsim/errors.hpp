#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Base of every error the library raises. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (machine files, points, elements, expressions).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A configured budget (interned states, search configurations) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A linear system that must be invertible turned out singular. Raising this
// indicates a bug, never bad input.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

}  // namespace selfsim
