#pragma once

#include <stdexcept>
#include <string>

namespace tactile {

// Process exit codes shared by every CLI command.
enum class ExitCode : int {
  ok = 0,
  input = 2,
  numerical = 3,
  io = 4,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ExitCode code)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Argument outside the mathematical domain of an operation
// (negative stretch, mu*alpha <= 0, phi >= 0.4, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what, ExitCode::input) {}
};

// Malformed or inconsistent user input: CSV schema, id mismatches, bad config.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what, ExitCode::input) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, ExitCode::numerical) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what, ExitCode::io) {}
};

}  // namespace tactile
