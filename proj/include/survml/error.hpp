#pragma once

#include <stdexcept>
#include <string>

namespace survml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override { return message_.c_str(); }

  /// Prefixes the message with "<context>: ", e.g. the pipeline stage that failed.
  void add_context(const std::string& context) { message_ = context + ": " + message_; }

 private:
  std::string message_;
};

/// Malformed CSV input (ragged row, unterminated quote).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Table layout does not match what the operation needs.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

/// Matrix widths or lengths disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A hyperparameter or argument is outside its valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

/// Metric or scoring is undefined for the given input (e.g. a single class).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Model document could not be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace survml
