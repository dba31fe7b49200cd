#pragma once

#include <stdexcept>
#include <string>

namespace mbgp {

/// Base class for every error raised by the library. Each category maps to a
/// process exit code used by the command-line tool.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual int exit_code() const noexcept = 0;
};

/// Invalid arguments, configuration or data contents.
class InputError : public Error {
public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Factorization failures and degenerate conditional variances.
class NumericalError : public Error {
public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

/// File system and parse failures on external files.
class IoError : public Error {
public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 4; }
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

} // namespace mbgp
