#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mesa {

enum class ErrorCode {
  // ingest
  MalformedRow,
  NonMonotonicTime,
  EmptyInput,
  DegenerateRange,
  SchemaViolation,
  DuplicateId,
  DimensionMismatch,
  // regression
  SingularSystem,
  ShapeMismatch,
  ConstantInput,
  LengthMismatch,
  // metrics
  EmptyCorpus,
  EmptyUnion,
  ZeroVector,
  OutOfRange,
  // backends
  BackendUnavailable,
  Timeout,
  MalformedResponse,
  ContentRejected,
  UnknownRole,
  // agents
  UnparseableOutput,
  InsufficientDiversity,
  ValidationUnrecoverable,
  // pairing
  InsufficientCandidates,
  // cli
  UnknownAgent,
  InvalidConfig,
  PreconditionViolated,
  IoError,
  RunDirLocked,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of an external model service (CLI exit code 2).
bool is_backend_failure(ErrorCode code) noexcept;

/// Every failure the library reports is an Error carrying a machine-readable
/// code. Parsers attach the 1-based source lines that triggered the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::size_t> lines = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::size_t>& lines() const noexcept { return lines_; }

 private:
  ErrorCode code_;
  std::vector<std::size_t> lines_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace mesa
