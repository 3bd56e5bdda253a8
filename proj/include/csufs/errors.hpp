#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csufs {

/// Base class for every error raised by the library. The message always
/// starts with the error kind (e.g. "KTooLarge: ...").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyMatrix : public Error {
 public:
  EmptyMatrix(std::size_t rows, std::size_t cols)
      : Error("EmptyMatrix: matrix has " + std::to_string(rows) + " rows and " +
              std::to_string(cols) + " columns") {}
};

class NonFiniteEntry : public Error {
 public:
  NonFiniteEntry(std::size_t row, std::size_t col)
      : Error("NonFiniteEntry: entry (" + std::to_string(row) + ", " + std::to_string(col) +
              ") is NaN or infinite"),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class KTooLarge : public Error {
 public:
  KTooLarge(std::size_t k, std::size_t n)
      : Error("KTooLarge: k=" + std::to_string(k) + " requires at least k+1 samples, got n=" +
              std::to_string(n)) {}
};

class TooFewSamples : public Error {
 public:
  TooFewSamples(std::size_t n, std::size_t required)
      : Error("TooFewSamples: got " + std::to_string(n) + " samples, need at least " +
              std::to_string(required)) {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("LengthMismatch: lengths " + std::to_string(a) + " and " + std::to_string(b) +
              " differ") {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("InvalidArgument: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t col, const std::string& detail)
      : Error("ParseError: line " + std::to_string(line) + ", column " + std::to_string(col) +
              ": " + detail),
        line_(line),
        col_(col) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

class RaggedRows : public Error {
 public:
  RaggedRows(std::size_t line, std::size_t expected, std::size_t got)
      : Error("RaggedRows: line " + std::to_string(line) + " has " + std::to_string(got) +
              " fields, expected " + std::to_string(expected)),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LabelColumnMissing : public Error {
 public:
  explicit LabelColumnMissing(const std::string& selector)
      : Error("LabelColumnMissing: no column matches '" + selector + "'") {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError: " + what) {}
};

}  // namespace csufs
