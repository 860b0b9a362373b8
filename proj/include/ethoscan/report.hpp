#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ethoscan/detectors.hpp"
#include "ethoscan/snapshot.hpp"

namespace ethoscan::report {

inline constexpr const char* kStatusWording = "potential violation";

struct CheckInput {
  const Snapshot* primary = nullptr;
  const Snapshot* pair = nullptr;          // second repository for S2
  std::optional<std::int64_t> issue;       // restrict issue-level checks to one issue
  std::vector<std::string> requestedTypes;  // "s1".."s9" or "all"
};

struct RunReport {
  std::string toolVersion;
  Date evaluationDate;
  std::vector<std::string> inputs;
  std::vector<Violation> violations;        // sorted by subject, type, evidence
  std::vector<detect::Diagnostic> diagnostics;
  std::map<std::string, double> timings;    // detector -> milliseconds
  bool includeTimings = false;
};

/// Expands and validates the requested types against what the input supports.
/// `all` covers the issue-level types only when the snapshot has issues, and
/// S2 only when a pair is given; an issue input limits `all` to S1 and S8.
/// Throws Error(kUsage) for unknown types, S2 without a pair, or issue-level
/// types against a repository-level snapshot.
std::vector<BehaviorType> resolve_types(const std::vector<std::string>& requested, Scope scope,
                                        bool has_pair, bool issue_input);

RunReport run_check(const CheckInput& input, const detect::DetectorContext& ctx,
                    bool include_timings = false);

nlohmann::json to_json(const RunReport& r);
std::string render_json(const RunReport& r);  // key-sorted, trailing newline
std::string render_text(const RunReport& r);

/// 1 with violations, else 3 with diagnostics, else 0. Errors map to 2 at
/// the call site.
int exit_status(const RunReport& r);

}  // namespace ethoscan::report
