#pragma once

#include <stdexcept>
#include <string>

namespace taylorlaw {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map categories to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values: nonpositive tail index, probability outside [0,1].
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input data outside an operation's domain: empty sample, too few points.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Tail index outside the range in which a probability limit holds.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// A statistic that cannot be formed (all top order statistics equal, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A log-ratio whose denominator is numerically zero.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace taylorlaw
