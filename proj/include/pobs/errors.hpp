#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pobs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

class EigenSolverFailure : public Error {
 public:
  using Error::Error;
};

// A spectral function is undefined (or non-finite) at a spectrum point.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidBasis : public Error {
 public:
  using Error::Error;
};

class ZeroDyad : public Error {
 public:
  using Error::Error;
};

// Translation displacement that is not an integer multiple of the resolution.
class NonLatticeTranslation : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

// Scenario/config validation failure; `path` is a JSON-pointer-like field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pobs
