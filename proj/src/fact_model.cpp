#include "ethoscan/fact_model.hpp"

#include <algorithm>

#include "ethoscan/errors.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan {
namespace {

[[noreturn]] void invariant(const std::string& what) {
  throw Error(ErrorCode::kFormat, "fact model invariant violated: " + what);
}

bool valid_sha(std::string_view sha) {
  if (sha.size() < 7 || sha.size() > 40) return false;
  return std::all_of(sha.begin(), sha.end(),
                     [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

void check_path(const FileContent& f, const std::string& where) {
  if (f.path.empty() || f.path.front() == '/' || f.path.find('\\') != std::string::npos) {
    invariant(where + ": bad path '" + f.path + "'");
  }
  if (f.contentCount < 0) invariant(where + ": negative contentCount");
  if (f.content && static_cast<std::int64_t>(f.content->size()) != f.contentCount) {
    invariant(where + ": contentCount of '" + f.path + "' does not match content size");
  }
}

void check_repo(const RepositoryFacts& r) {
  const std::string id = r.owner + "/" + r.name;
  if (r.owner.empty() || r.name.empty()) invariant("repository with empty owner or name");
  if (r.fileCount < 0) invariant(id + ": negative fileCount");
  for (const auto& f : r.files) check_path(f, id + ".files");
  if (r.licenseFile) {
    check_path(*r.licenseFile, id + ".licenseFile");
    if (!text::is_root_path(r.licenseFile->path)) {
      invariant(id + ": licenseFile is not in the repository root");
    }
  }
  if (r.readmeFile) check_path(*r.readmeFile, id + ".readmeFile");
  if (r.changelogFile) check_path(*r.changelogFile, id + ".changelogFile");
  if (std::find(r.forkList.begin(), r.forkList.end(), id) != r.forkList.end()) {
    invariant(id + ": forkList contains the repository itself");
  }
  for (const auto& u : r.contributors) {
    if (u.login.empty()) invariant(id + ": empty contributor login");
  }
  std::set<std::string> shas;
  for (size_t i = 0; i < r.licenseCommits.size(); ++i) {
    const auto& c = r.licenseCommits[i];
    if (!valid_sha(c.sha)) invariant(id + ": malformed commit sha '" + c.sha + "'");
    if (!shas.insert(c.sha).second) invariant(id + ": duplicate license commit " + c.sha);
    if (i > 0 && c.timestamp < r.licenseCommits[i - 1].timestamp) {
      invariant(id + ": licenseCommits not sorted oldest first");
    }
    if (c.pullRequestCount < 0) invariant(id + ": negative pullRequestCount");
  }
}

}  // namespace

RepoId RepoId::parse(std::string_view text) {
  auto parts = text::split(text, '/');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    throw Error(ErrorCode::kFormat, "expected OWNER/NAME, got '" + std::string(text) + "'");
  }
  return {parts[0], parts[1]};
}

std::string FileContent::text() const { return content ? text::lossy_utf8(*content) : ""; }

const FileContent* RepositoryFacts::find_file(std::string_view path) const {
  for (const auto& f : files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

std::string_view to_string(BehaviorType t) {
  switch (t) {
    case BehaviorType::kS1: return "S1";
    case BehaviorType::kS2: return "S2";
    case BehaviorType::kS5: return "S5";
    case BehaviorType::kS6: return "S6";
    case BehaviorType::kS8: return "S8";
    case BehaviorType::kS9: return "S9";
  }
  return "?";
}

std::optional<BehaviorType> parse_behavior(std::string_view s) {
  std::string lower = text::to_lower_ascii(s);
  for (auto t : kAllBehaviors) {
    if (text::to_lower_ascii(to_string(t)) == lower) return t;
  }
  return std::nullopt;
}

bool is_issue_level(BehaviorType t) { return t == BehaviorType::kS1 || t == BehaviorType::kS8; }

std::string Subject::describe() const {
  return issue ? repo.full() + "#" + std::to_string(*issue) : repo.full();
}

FactStore::FactStore(std::vector<RepositoryFacts> repos, std::vector<IssueFacts> issues) {
  for (auto& r : repos) {
    check_repo(r);
    RepoId id = r.id();
    if (!repos_.emplace(id, std::move(r)).second) {
      invariant("duplicate repository " + id.full());
    }
  }
  for (auto& issue : issues) {
    if (!repos_.count(issue.repo)) {
      invariant("issue #" + std::to_string(issue.number) + " references unknown repository " +
                issue.repo.full());
    }
    if (issue.number <= 0) invariant("issue number must be positive");
    if (issue.owner.login.empty()) invariant("issue owner login is empty");
    if (issue.kind == IssueKind::kIssue && !issue.linkedCommits.empty()) {
      invariant("plain issue #" + std::to_string(issue.number) + " carries linked commits");
    }
    issues_[issue.repo].push_back(std::move(issue));
  }
  for (auto& [id, list] : issues_) {
    std::sort(list.begin(), list.end(),
              [](const IssueFacts& a, const IssueFacts& b) { return a.number < b.number; });
    for (size_t i = 1; i < list.size(); ++i) {
      if (list[i].number == list[i - 1].number) {
        invariant(id.full() + ": issue number " + std::to_string(list[i].number) +
                  " used twice");
      }
    }
  }
}

const RepositoryFacts& FactStore::repo(const RepoId& id) const {
  auto it = repos_.find(id);
  if (it == repos_.end()) throw Error(ErrorCode::kUnknownRepo, "unknown repository " + id.full());
  return it->second;
}

std::vector<RepoId> FactStore::repo_ids() const {
  std::vector<RepoId> ids;
  ids.reserve(repos_.size());
  for (const auto& [id, _] : repos_) ids.push_back(id);
  return ids;
}

std::span<const IssueFacts> FactStore::issues_of(const RepoId& id) const {
  repo(id);
  auto it = issues_.find(id);
  if (it == issues_.end()) return {};
  return it->second;
}

const IssueFacts* FactStore::find_issue(const RepoId& id, std::int64_t number) const {
  for (const auto& issue : issues_of(id)) {
    if (issue.number == number) return &issue;
  }
  return nullptr;
}

bool FactStore::is_contributor(const UserRef& user, const RepoId& id) const {
  return repo(id).contributors.count(user) != 0;
}

std::span<const IssueFacts> issues_of(const FactStore& store, const RepoId& repo) {
  return store.issues_of(repo);
}

bool is_contributor(const FactStore& store, const UserRef& user, const RepoId& repo) {
  return store.is_contributor(user, repo);
}

}  // namespace ethoscan
