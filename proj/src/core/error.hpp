#pragma once

#include <stdexcept>
#include <string>

namespace penh {

enum class ErrorCode {
  NotFound = 1,
  FormatError,
  IoError,
  ShapeError,
  ConfigError,
  EmptyCorpus,
  PairingError,
  DependencyError,
  DivergenceError,
  CheckpointVersionError,
  InvalidArgument,
  Internal,
};

const char* error_code_name(ErrorCode code);

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

}  // namespace penh
