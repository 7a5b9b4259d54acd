#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace martsia {

/// Stable failure taxonomy shared by the library and the CLI. The numeric
/// values are the CLI exit codes.
enum class ErrorCode : int {
  Unauthorized = 10,
  IntegrityFailure = 11,
  MajorityMissing = 12,
  CommitMismatch = 13,
  NotFound = 14,
  Malformed = 15,
  MixedGid = 16,
  RoleDenied = 17,
  Conflict = 18,
  PhaseError = 19,
  InconsistentAuthorities = 20,
  InvalidArgument = 21,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace martsia
