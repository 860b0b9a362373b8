#include "ethoscan/errors.hpp"

namespace ethoscan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnknownRepo: return "unknown-repo";
    case ErrorCode::kRuleParse: return "rule-parse";
    case ErrorCode::kRuleUnsafe: return "rule-unsafe";
    case ErrorCode::kRuleStratification: return "rule-stratification";
    case ErrorCode::kRuleSemantics: return "rule-semantics";
    case ErrorCode::kBuiltinType: return "builtin-type";
    case ErrorCode::kFuelExhausted: return "fuel-exhausted";
    case ErrorCode::kSimilarity: return "similarity";
    case ErrorCode::kIncompleteTree: return "incomplete-tree";
    case ErrorCode::kMissingDiff: return "missing-diff";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kRateLimited: return "rate-limited";
    case ErrorCode::kBudgetExhausted: return "budget-exhausted";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kPartialFetch: return "partial-fetch";
    case ErrorCode::kDisallowedHost: return "disallowed-host";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace ethoscan
