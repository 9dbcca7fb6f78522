#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchnet {

// Errors caused by bad input (ids, files, flags). The CLI maps these to exit
// code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors raised while executing a valid request. CLI exit code 3.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IdentifierError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AsymmetryError : public ValidationError {
 public:
  AsymmetryError(std::string a, std::string b)
      : ValidationError("adjacency matrix is asymmetric at (" + a + ", " + b + ")"),
        first(std::move(a)),
        second(std::move(b)) {}
  std::string first;
  std::string second;
};

class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyGridError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Text-level parse failure. `line`/`column` are 1-based; 0 when unknown.
/// `offset` is a byte offset for formats that report one (JSON).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column,
             std::size_t offset = 0)
      : ValidationError(what), line(line), column(column), offset(offset) {}
  std::size_t line;
  std::size_t column;
  std::size_t offset;
};

// Firing a disabled transition.
class SemanticsError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class NoCrossingError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class MergeError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class IoError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace patchnet
