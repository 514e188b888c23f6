#include "brenier/error.hpp"

namespace brenier {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kOrderUnsupported: return "OrderUnsupported";
    case ErrorCode::kSingularHessian: return "SingularHessian";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
    case ErrorCode::kInversionFailure: return "InversionFailure";
    case ErrorCode::kMissingComposites: return "MissingComposites";
    case ErrorCode::kInvalidN: return "InvalidN";
    case ErrorCode::kRouteUnavailable: return "RouteUnavailable";
    case ErrorCode::kSeedRequired: return "SeedRequired";
    case ErrorCode::kInvalidExponent: return "InvalidExponent";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace brenier
