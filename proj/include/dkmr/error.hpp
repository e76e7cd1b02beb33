#pragma once

#include <stdexcept>
#include <string>

namespace dkmr {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with user-supplied input (files, flags, parameters).
// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariants. The CLI maps these to exit code 2.
class InternalError : public Error {
 public:
  using Error::Error;
};

class MissingFileError : public ValidationError {
 public:
  explicit MissingFileError(const std::string& path)
      : ValidationError("missing file: " + path) {}
};

class MalformedRowError : public ValidationError {
 public:
  MalformedRowError(const std::string& path, std::size_t line, const std::string& reason)
      : ValidationError(path + ":" + std::to_string(line) + ": " + reason) {}
};

class DuplicateIdError : public ValidationError {
 public:
  DuplicateIdError(const std::string& path, std::size_t line, const std::string& id)
      : ValidationError(path + ":" + std::to_string(line) + ": duplicate id: " + id) {}
};

class DanglingReferenceError : public ValidationError {
 public:
  DanglingReferenceError(const std::string& path, std::size_t line, const std::string& id)
      : ValidationError(path + ":" + std::to_string(line) + ": reference to unknown id: " + id) {}
};

class EmptyMatrixError : public ValidationError {
 public:
  EmptyMatrixError() : ValidationError("matrix must be non-empty") {}
};

class NonNegligibleImaginaryError : public InternalError {
 public:
  explicit NonNegligibleImaginaryError(double max_imag)
      : InternalError("inverse transform produced non-negligible imaginary part (max " +
                      std::to_string(max_imag) + "); spectrum is not conjugate-symmetric") {}
};

class EmptyScoresError : public ValidationError {
 public:
  EmptyScoresError() : ValidationError("cannot rank an empty score map") {}
};

class AllDifferencesZeroError : public ValidationError {
 public:
  AllDifferencesZeroError()
      : ValidationError("all paired differences are zero; signed-rank test is undefined") {}
};

class InvalidParamsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace dkmr
