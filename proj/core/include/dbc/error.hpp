#pragma once

#include <stdexcept>
#include <string>

namespace dbc {

/// Failure categories. The CLI maps them onto stable process exit codes.
enum class ErrorKind {
  usage = 1,      // bad flags or arguments
  data = 2,       // input violates a data or model contract
  numerical = 3,  // divergence, non-finite values, solver trouble
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

}  // namespace dbc
