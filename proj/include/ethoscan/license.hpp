#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ethoscan/fact_model.hpp"

namespace ethoscan::license {

struct LicenseEntry {
  std::string spdx;
  std::string name;
  std::vector<std::string> aliases;  // names searched in READMEs and diffs
  std::vector<std::string> phrases;  // all must occur in a full license text
  std::string header;                // opening of the canonical text
};

class LicenseCatalog {
 public:
  static LicenseCatalog from_json(const nlohmann::json& j);
  static LicenseCatalog load(const std::filesystem::path& path);
  /// `data/licenses.json` under the data directory.
  static LicenseCatalog load_default();

  const std::vector<LicenseEntry>& entries() const { return entries_; }
  const LicenseEntry* find(std::string_view spdx) const;

  /// Full-text match: every phrase of an entry present (case and whitespace
  /// insensitive); the most specific entry wins.
  const LicenseEntry* match_text(std::string_view text) const;
  /// Earliest whole-word, case-insensitive mention of an SPDX id or alias.
  struct NameMatch {
    const LicenseEntry* entry = nullptr;
    std::string matched;
  };
  std::optional<NameMatch> match_name(std::string_view text) const;
  /// match_text, falling back to match_name.
  const LicenseEntry* identify(std::string_view text) const;

 private:
  std::vector<LicenseEntry> entries_;
};

enum class LicenseSource { kLicenseFile, kReadme };
std::string_view to_string(LicenseSource s);

struct LicenseInfo {
  std::string spdxId;  // "unknown" for an unrecognised license file
  LicenseSource source = LicenseSource::kLicenseFile;
  std::string matchedName;
  std::string path;
};

/// Case-insensitive basenames accepted as a license file.
const std::vector<std::string>& license_file_names();
bool is_license_file_name(std::string_view path);
const std::vector<std::string>& readme_file_names();
bool is_readme_file_name(std::string_view path);
const std::vector<std::string>& changelog_file_names();
bool is_changelog_file_name(std::string_view path);

/// Root LICENSE file first, then the root README. Never looks below the
/// repository root.
std::optional<LicenseInfo> detect_repo_license(const RepositoryFacts& repo,
                                               const LicenseCatalog& catalog);

/// Files (all in the root) that detect_repo_license inspects.
std::vector<std::string> license_search_paths(const RepositoryFacts& repo);

struct LicenseChangeEvent {
  CommitInfo commit;
  std::string fromLicense;
  std::string toLicense;
};

/// One event per commit after the first whose diff switches the identified
/// license. Throws Error(kMissingDiff) when a commit has no diff text.
std::vector<LicenseChangeEvent> extract_license_changes(const RepositoryFacts& repo,
                                                        const LicenseCatalog& catalog);

/// Lines added and removed by a unified diff (headers excluded).
struct DiffSides {
  std::string removed;
  std::string added;
};
DiffSides split_diff(std::string_view diff);

}  // namespace ethoscan::license
