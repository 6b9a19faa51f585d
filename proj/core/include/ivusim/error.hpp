#pragma once

#include <stdexcept>
#include <string>

namespace ivusim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A tensor or image had the wrong dimensions.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A training step produced a non-finite loss.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace ivusim
