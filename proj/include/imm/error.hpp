#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imm {

// Malformed input text. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A node id outside [0, n).
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A numeric argument outside the domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An exact oracle was asked for an instance larger than it enumerates.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration, detected before any trial runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace imm
