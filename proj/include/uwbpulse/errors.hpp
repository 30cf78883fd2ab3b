#pragma once

#include <stdexcept>
#include <string>

namespace uwbpulse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid too coarse or off-grid access.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Parameters violate a documented precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message carries the line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class UnboundedError : public Error {
 public:
  using Error::Error;
};

// Riesz lower bound too small, near-singular Gram, or a spectrum touching zero.
class UnstableError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace uwbpulse
