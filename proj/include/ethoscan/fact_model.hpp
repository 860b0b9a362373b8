#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ethoscan/time.hpp"

namespace ethoscan {

/// `owner/name` identifier of a hosted repository.
struct RepoId {
  std::string owner;
  std::string name;

  std::string full() const { return owner + "/" + name; }

  /// Throws Error(kFormat) unless `text` is exactly `owner/name`.
  static RepoId parse(std::string_view text);

  friend auto operator<=>(const RepoId&, const RepoId&) = default;
};

/// Login names compare exactly, case included.
struct UserRef {
  std::string login;

  friend auto operator<=>(const UserRef&, const UserRef&) = default;
};

struct CommitInfo {
  std::string sha;
  Timestamp timestamp;
  std::optional<std::string> codeChange;  // unified diff; absent when not fetched
  std::int64_t pullRequestCount = 0;

  friend bool operator==(const CommitInfo&, const CommitInfo&) = default;
};

struct FileContent {
  std::string path;
  std::optional<std::string> content;  // raw bytes; absent when not fetched
  std::int64_t contentCount = 0;       // byte size

  /// Content decoded as UTF-8 with lossy replacement; empty when absent.
  std::string text() const;

  friend bool operator==(const FileContent&, const FileContent&) = default;
};

struct ReleaseInfo {
  std::string tag;
  Date publishedDate;

  friend bool operator==(const ReleaseInfo&, const ReleaseInfo&) = default;
};

struct RepositoryFacts {
  std::string owner;
  std::string name;
  bool isFork = false;
  std::optional<std::string> parentFullName;
  std::vector<std::string> forkList;
  std::int64_t fileCount = 0;
  std::vector<FileContent> files;
  std::optional<FileContent> licenseFile;
  std::optional<FileContent> readmeFile;
  std::optional<FileContent> changelogFile;
  std::set<UserRef> contributors;
  std::optional<ReleaseInfo> latestRelease;
  std::vector<CommitInfo> licenseCommits;  // oldest first
  std::vector<std::string> externalLinks;

  RepoId id() const { return {owner, name}; }
  const FileContent* find_file(std::string_view path) const;

  friend bool operator==(const RepositoryFacts&, const RepositoryFacts&) = default;
};

enum class IssueKind { kIssue, kPullRequest };

struct Post {
  UserRef author;
  std::string text;

  friend bool operator==(const Post&, const Post&) = default;
};

struct IssueFacts {
  RepoId repo;
  std::int64_t number = 0;
  IssueKind kind = IssueKind::kIssue;
  UserRef owner;
  std::vector<Post> bodyAndComments;  // first entry is the opening post
  std::vector<CommitInfo> linkedCommits;

  friend bool operator==(const IssueFacts&, const IssueFacts&) = default;
};

enum class BehaviorType { kS1, kS2, kS5, kS6, kS8, kS9 };

std::string_view to_string(BehaviorType t);          // "S1"
std::optional<BehaviorType> parse_behavior(std::string_view s);  // "s1" or "S1"
inline constexpr BehaviorType kAllBehaviors[] = {BehaviorType::kS1, BehaviorType::kS2,
                                                 BehaviorType::kS5, BehaviorType::kS6,
                                                 BehaviorType::kS8, BehaviorType::kS9};
bool is_issue_level(BehaviorType t);

struct Subject {
  RepoId repo;
  std::optional<std::int64_t> issue;

  std::string describe() const;  // `owner/name` or `owner/name#12`

  friend auto operator<=>(const Subject&, const Subject&) = default;
};

struct EvidenceItem {
  std::string label;
  std::string value;
  std::optional<std::string> location;

  friend auto operator<=>(const EvidenceItem&, const EvidenceItem&) = default;
};

struct Violation {
  BehaviorType behaviorType = BehaviorType::kS1;
  Subject subject;
  std::vector<EvidenceItem> evidence;
  std::vector<std::string> ruleTrace;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Read-only graph of repositories and their issues. A pull request is an
/// issue of kind kPullRequest and shows up in every issue query.
class FactStore {
 public:
  FactStore() = default;
  /// Validates the model invariants; throws Error(kFormat) naming the first
  /// violated one.
  FactStore(std::vector<RepositoryFacts> repos, std::vector<IssueFacts> issues);

  bool has_repo(const RepoId& id) const { return repos_.count(id) != 0; }
  const RepositoryFacts& repo(const RepoId& id) const;  // Error(kUnknownRepo)
  std::vector<RepoId> repo_ids() const;

  /// Issues and pull requests ordered by number.
  std::span<const IssueFacts> issues_of(const RepoId& id) const;
  const IssueFacts* find_issue(const RepoId& id, std::int64_t number) const;

  bool is_contributor(const UserRef& user, const RepoId& id) const;

  friend bool operator==(const FactStore&, const FactStore&) = default;

 private:
  std::map<RepoId, RepositoryFacts> repos_;
  std::map<RepoId, std::vector<IssueFacts>> issues_;
};

/// Free-function forms of the store queries.
std::span<const IssueFacts> issues_of(const FactStore& store, const RepoId& repo);
bool is_contributor(const FactStore& store, const UserRef& user, const RepoId& repo);

}  // namespace ethoscan
