#pragma once

#include <stdexcept>
#include <string>

namespace aim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text could not be parsed; carries the 1-based source line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// An exact computation would exceed the configured enumeration budget.
// `required` and `limit` are in the unit named by `kind` (bits, states, ...).
class EnumerationTooLarge : public Error {
 public:
  EnumerationTooLarge(const std::string& kind, long long required, long long limit)
      : Error("enumeration too large: " + kind + " requires " + std::to_string(required) +
              ", limit is " + std::to_string(limit)),
        required_(required),
        limit_(limit) {}

  long long required() const { return required_; }
  long long limit() const { return limit_; }

 private:
  long long required_;
  long long limit_;
};

class PolicyViolation : public Error {
 public:
  using Error::Error;
};

class InconsistentRealisation : public Error {
 public:
  using Error::Error;
};

class MalformedTree : public Error {
 public:
  using Error::Error;
};

class ItemAlreadySelected : public Error {
 public:
  using Error::Error;
};

}  // namespace aim
