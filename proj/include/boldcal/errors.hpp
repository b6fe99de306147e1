#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boldcal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its domain (e.g. delta <= 0, prior outside (0,1)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inverse requested for the gamma == 0 collapse map.
class NonInvertibleError : public Error {
 public:
  using Error::Error;
};

/// The likelihood has no finite maximizer (single-class outcomes or
/// perfect separation).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// AUC requested on data containing only one outcome class.
class UndefinedAucError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed, e.g. a negative LRT statistic.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. `row()` is 1-based and counts the header line,
/// 0 when the error is not tied to a row.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error(row == 0 ? what : "row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace boldcal
