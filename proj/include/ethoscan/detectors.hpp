#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ethoscan/fact_model.hpp"
#include "ethoscan/license.hpp"
#include "ethoscan/rules.hpp"
#include "ethoscan/similarity.hpp"
#include "ethoscan/snapshot.hpp"

namespace ethoscan::detect {

struct DetectorConfig {
  double s1Threshold = 0.10;
  bool s2RequireExact = true;
  std::int64_t s9StaleDays = 183;
  std::vector<std::string> s8ExcludedPathSegments = default_excluded_segments();
  std::string soLinkPattern;  // empty: links::default_so_link_pattern()
  size_t s8MaxLinksPerIssue = 10;
  size_t gramLength = similarity::kDefaultGramLength;
  size_t winnowWindow = 0;
  similarity::ExtensionSet sourceExtensions = similarity::default_source_extensions();
  std::vector<std::string> paidMarkers = {"in-app purchase"};

  static std::vector<std::string> default_excluded_segments();
  const std::string& so_pattern() const;
  /// Throws Error(kUsage) for out-of-range values.
  void validate() const;
};

/// A check that could not be decided from the available facts.
struct Diagnostic {
  BehaviorType behaviorType = BehaviorType::kS1;
  Subject subject;
  std::string reason;
  std::optional<std::string> location;

  friend auto operator<=>(const Diagnostic&, const Diagnostic&) = default;
};

struct DetectionResult {
  std::vector<Violation> violations;
  std::vector<Diagnostic> diagnostics;
};

/// One parsed rule pack per behavior type.
class RulePacks {
 public:
  /// Reads `<dir>/s1.rules` ... `<dir>/s9.rules`; each extra file is appended
  /// to every pack.
  static RulePacks load(const std::filesystem::path& dir,
                        const std::vector<std::filesystem::path>& extra = {});
  /// `rules/` under the data directory.
  static RulePacks load_default(const std::vector<std::filesystem::path>& extra = {});
  static RulePacks from_sources(
      const std::map<BehaviorType, std::string>& packs,
      const std::vector<std::pair<std::string, std::string>>& extra = {});

  const rules::RuleSet& pack(BehaviorType t) const;

 private:
  std::map<BehaviorType, rules::RuleSet> packs_;
};

struct DetectorContext {
  const RulePacks& rules;
  const license::LicenseCatalog& catalog;
  DetectorConfig config;
  Date evaluationDate;
};

/// Declares every helper predicate the detectors may add, so extra rule files
/// can mention them in any pack.
void declare_helper_predicates(rules::Database& db);

// --- Stack Overflow pages ----------------------------------------------------

struct SoAnswer {
  std::string owner;  // display name shown on the answer
  std::string code;   // all code blocks, HTML-unescaped, newline separated
};

/// Extracts the answer `answer_id` (or the first answer when absent or not on
/// the page). Returns nullopt when the page has no recognizable post.
std::optional<SoAnswer> parse_so_answer(std::string_view html,
                                        const std::optional<std::string>& answer_id);

std::string html_unescape(std::string_view s);

// --- detectors ---------------------------------------------------------------

DetectionResult detect_s1(const FactStore& store, const IssueFacts& issue, const PageCache& pages,
                          const DetectorContext& ctx);
DetectionResult detect_s2(const FactStore& store, const RepoId& r1, const RepoId& r2,
                          const DetectorContext& ctx);
DetectionResult detect_s5(const FactStore& store, const RepoId& repo, const DetectorContext& ctx);
DetectionResult detect_s6(const FactStore& store, const RepoId& repo, const DetectorContext& ctx);
DetectionResult detect_s8(const FactStore& store, const IssueFacts& issue,
                          const DetectorContext& ctx);
DetectionResult detect_s9(const FactStore& store, const RepoId& repo, const PageCache& pages,
                          const DetectorContext& ctx);

/// Whether `url` contains one of the excluded segments.
bool is_excluded_link(std::string_view url, const std::vector<std::string>& segments);

}  // namespace ethoscan::detect
