#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brenier {

enum class ErrorCode {
  kDomainError,
  kOrderUnsupported,
  kSingularHessian,
  kQuadratureFailure,
  kInversionFailure,
  kMissingComposites,
  kInvalidN,
  kRouteUnavailable,
  kSeedRequired,
  kInvalidExponent,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library; `code()` tells callers
/// which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace brenier
