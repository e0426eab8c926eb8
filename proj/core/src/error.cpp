#include "mesa/error.hpp"

#include <fmt/format.h>

namespace mesa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyUnion: return "EmptyUnion";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::ContentRejected: return "ContentRejected";
    case ErrorCode::UnknownRole: return "UnknownRole";
    case ErrorCode::UnparseableOutput: return "UnparseableOutput";
    case ErrorCode::InsufficientDiversity: return "InsufficientDiversity";
    case ErrorCode::ValidationUnrecoverable: return "ValidationUnrecoverable";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::RunDirLocked: return "RunDirLocked";
  }
  return "Unknown";
}

bool is_backend_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BackendUnavailable:
    case ErrorCode::Timeout:
    case ErrorCode::MalformedResponse:
    case ErrorCode::ContentRejected:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message, std::vector<std::size_t> lines)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)),
      code_(code),
      lines_(std::move(lines)) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace mesa
