#pragma once

#include <stdexcept>
#include <string>

namespace fpr {

/// Failure categories shared by the library, the C API and the CLI.
enum class ErrorKind {
  invalid_argument,
  io,
  schema,
  topology,
  catalog,
  contract,
  unplannable,
  infeasible,
  numerical,
};

/// Short machine-readable name, used as the CLI error prefix.
const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace fpr
