#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ethoscan {

enum class ErrorCode {
  kUsage = 1,
  kIo,
  kFormat,          // snapshot schema / version problems
  kUnknownRepo,
  kRuleParse,
  kRuleUnsafe,
  kRuleStratification,
  kRuleSemantics,   // arity clash, duplicate rule, unknown predicate
  kBuiltinType,
  kFuelExhausted,
  kSimilarity,      // empty needle, k mismatch
  kIncompleteTree,
  kMissingDiff,
  kAuth,
  kRateLimited,
  kBudgetExhausted,
  kNotFound,
  kPartialFetch,
  kDisallowedHost,
  kNetwork,
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ethoscan
