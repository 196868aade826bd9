#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace votelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A prediction or weights file could not be parsed. `row` counts data rows
/// from 1 (the header is row 0).
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : ValidationError("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// File could not be opened, read, written or renamed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace votelab
