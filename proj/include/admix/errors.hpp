#pragma once

#include <stdexcept>
#include <string>

namespace admix {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- data ingestion ---

class MissingColumn : public Error {
 public:
  MissingColumn(const std::string& column, int row)
      : Error("missing column '" + column + "' at row " + std::to_string(row)),
        column(column),
        row(row) {}
  std::string column;
  int row;  // 1-based line number, 1 = header
};

class EmptyField : public Error {
 public:
  EmptyField(const std::string& column, int row)
      : Error("empty field '" + column + "' at row " + std::to_string(row)),
        column(column),
        row(row) {}
  std::string column;
  int row;
};

class NonUtf8Input : public Error {
 public:
  explicit NonUtf8Input(int row)
      : Error("invalid UTF-8 at row " + std::to_string(row)), row(row) {}
  int row;
};

// --- numerics ---

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class NonFiniteDensity : public Error {
 public:
  explicit NonFiniteDensity(const std::string& msg) : Error(msg) {}
};

class NonFiniteGradient : public Error {
 public:
  NonFiniteGradient(int coordinate, const std::string& msg)
      : Error("non-finite gradient at coordinate " + std::to_string(coordinate) +
              ": " + msg),
        coordinate(coordinate) {}
  int coordinate;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class DegenerateMass : public Error {
 public:
  explicit DegenerateMass(const std::string& msg) : Error(msg) {}
};

class GridTooLarge : public Error {
 public:
  explicit GridTooLarge(const std::string& msg) : Error(msg) {}
};

}  // namespace admix
