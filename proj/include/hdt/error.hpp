#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdt {

/// Caller passed something the operation cannot accept (shape, modulus, range).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A pair file parsed fine but its matrices fail certification.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A receiver observed a value the protocol can never produce on a clean channel.
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested computation exceeds the exact-enumeration limits.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hdt
