#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpcc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed problem text; carries the 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Division by zero or zero raised to a negative power.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Dimension or structural mismatch between a problem and its data.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid regularization or algorithm parameter (t <= 0, beta <= 1, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The query point is too infeasible to classify; carries its violation.
class ClassificationRefused : public Error {
 public:
  ClassificationRefused(const std::string& what, double violation)
      : Error(what + " (maxvio " + std::to_string(violation) + ")"), violation_(violation) {}
  double violation() const { return violation_; }

 private:
  double violation_;
};

}  // namespace mpcc
