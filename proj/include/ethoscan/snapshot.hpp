#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ethoscan/fact_model.hpp"

namespace ethoscan {

inline constexpr int kSnapshotFormatVersion = 1;

/// Which input level a snapshot was captured for.
enum class Scope { kRepoLevel, kIssueLevel, kBoth };

std::string_view to_string(Scope s);
std::optional<Scope> parse_scope(std::string_view s);
inline bool covers_issues(Scope s) { return s != Scope::kRepoLevel; }

/// URL -> cached page text. A null entry marks the page as unavailable.
using PageCache = std::map<std::string, std::optional<std::string>>;

/// Offline bundle of one repository's facts.
struct Snapshot {
  int formatVersion = kSnapshotFormatVersion;
  Timestamp capturedAt;
  Scope scope = Scope::kBoth;
  RepositoryFacts repo;
  std::vector<IssueFacts> issues;
  // Repositories referenced from issue text, with at least their contributor
  // sets; these let link-based checks resolve offline.
  std::vector<RepositoryFacts> relatedRepos;
  PageCache externalPages;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Builds a store holding the primary repo, the related repos and the issues.
FactStore make_store(const Snapshot& s);
/// Same, but merges several snapshots (e.g. an S2 pair). Repositories that
/// appear more than once keep the first, most complete, copy.
FactStore make_store(const std::vector<const Snapshot*>& snapshots);

nlohmann::json to_json(const Snapshot& s);
/// Strict: rejects unknown fields, missing fields and a foreign formatVersion.
/// Errors are Error(kFormat) and name the offending field path.
Snapshot snapshot_from_json(const nlohmann::json& j);

void save_snapshot(const Snapshot& s, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace ethoscan
