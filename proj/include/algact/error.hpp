#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace algact {

// Base class for every error raised by the library. Subclasses carry the
// category so the CLI can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// An explicit truncation window discards more than the allowed share of
// the l2 mass.
class WindowTooSmall : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A predicate declared closed under convolution, star and limits is not.
class ClosureViolation : public Error {
 public:
  using Error::Error;
};

// Syntax errors in ring expressions, measure specs, group ids and predicate
// strings. position() is a 0-based byte offset into the offending text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string text, std::size_t position)
      : Error(what), text_(std::move(text)), position_(position) {}

  const std::string& text() const { return text_; }
  std::size_t position() const { return position_; }

  // Two-line rendering: the input followed by a caret under the position.
  std::string caret() const {
    return text_ + "\n" + std::string(position_, ' ') + "^";
  }

 private:
  std::string text_;
  std::size_t position_;
};

}  // namespace algact
