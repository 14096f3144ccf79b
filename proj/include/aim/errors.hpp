#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A declared column is missing, a name is duplicated, or the descriptor is malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(int iterations, double residual)
      : Error("fixed-point iteration did not converge after " + std::to_string(iterations) +
              " iterations (max-norm residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// Both labels occur equally often, so the majority class is not defined.
class ClassTieError : public Error {
 public:
  using Error::Error;
};

class UndefinedBiasError : public Error {
 public:
  UndefinedBiasError() : Error("no comparable other-group evidence") {}
};

}  // namespace aim
