#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kronlow {

// Bad argument passed to a constructor or evaluator (non-finite parameter,
// out-of-range corner, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed point-set or scenario file. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Dimension outside what an evaluator or generator supports.
class UnsupportedDimension : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid optimizer / tuner configuration, or a size guard tripped.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kronlow
