#include "core/error.hpp"

namespace penh {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::PairingError: return "PairingError";
    case ErrorCode::DependencyError: return "DependencyError";
    case ErrorCode::DivergenceError: return "DivergenceError";
    case ErrorCode::CheckpointVersionError: return "CheckpointVersionError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace penh
