#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace war {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input or parameter shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an object in the wrong state
/// (missing forward cache, empty pool, unrevealed label...).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Infeasible or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Missing column or unexpected layout in an input file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity showed up where a finite number is required.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, int layer)
      : Error(what + " (layer " + std::to_string(layer) + ")"), layer_(layer) {}

  /// Index of the offending layer, or -1 when not tied to a layer.
  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

/// A cell of a delimited file could not be parsed as a finite number.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " at row " + std::to_string(row) + ", column " +
              std::to_string(column)),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A requested metric cannot be read off a learning curve.
class ReportingError : public Error {
 public:
  ReportingError(const std::string& what, double max_fraction)
      : Error(what), max_fraction_(max_fraction) {}

  /// Largest labeled fraction the curve actually reached.
  double max_fraction() const noexcept { return max_fraction_; }

 private:
  double max_fraction_;
};

}  // namespace war
