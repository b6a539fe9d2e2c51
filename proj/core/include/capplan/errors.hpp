#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace capplan {

// Thrown when a value violates a type invariant or an operation precondition.
// `field()` names the offending field when one applies (e.g. "network.bandwidth_bps").
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : std::invalid_argument(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed scenario document syntax. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace capplan
