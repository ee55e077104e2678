// Single error type used across the core; the C API maps codes 1:1.
#pragma once

#include <stdexcept>
#include <string>

namespace erblox {

enum class ErrorCode {
  Arg,
  Io,
  Parse,
  Validation,
  State,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace erblox
