#include "ethoscan/rules.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::rules {

void declare_base_predicates(Database& db) {
  static const std::pair<const char*, size_t> kBase[] = {
      {"repo", 1},           {"is_fork", 1},        {"parent", 2},
      {"fork", 2},           {"contributor", 2},    {"file", 2},
      {"file_count", 2},     {"license_file", 2},   {"readme_file", 2},
      {"changelog_file", 2}, {"latest_release", 3}, {"license_commit", 3},
      {"pull_request_count", 3}, {"external_link", 2}, {"issue", 3},
      {"pull_request", 2},   {"post", 4},
  };
  for (const auto& [name, arity] : kBase) db.declare(name, arity);
}

Database base_facts(const FactStore& store) {
  Database db;
  declare_base_predicates(db);
  for (const RepoId& id : store.repo_ids()) {
    const RepositoryFacts& r = store.repo(id);
    const Value rid{id.full()};
    db.add("repo", {rid});
    if (r.isFork) db.add("is_fork", {rid});
    if (r.parentFullName) db.add("parent", {rid, Value{*r.parentFullName}});
    for (const auto& f : r.forkList) db.add("fork", {rid, Value{f}});
    for (const auto& u : r.contributors) db.add("contributor", {rid, Value{u.login}});
    for (const auto& f : r.files) db.add("file", {rid, Value{f.path}});
    db.add("file_count", {rid, Value{r.fileCount}});
    if (r.licenseFile) db.add("license_file", {rid, Value{r.licenseFile->path}});
    if (r.readmeFile) db.add("readme_file", {rid, Value{r.readmeFile->path}});
    if (r.changelogFile) db.add("changelog_file", {rid, Value{r.changelogFile->path}});
    if (r.latestRelease) {
      db.add("latest_release", {rid, Value{r.latestRelease->tag}, Value{r.latestRelease->publishedDate}});
    }
    for (const auto& c : r.licenseCommits) {
      db.add("license_commit", {rid, Value{c.sha}, Value{c.timestamp.date()}});
      db.add("pull_request_count", {rid, Value{c.sha}, Value{c.pullRequestCount}});
    }
    for (const auto& link : r.externalLinks) db.add("external_link", {rid, Value{link}});
    for (const auto& issue : store.issues_of(id)) {
      const Value n{issue.number};
      db.add("issue", {rid, n, Value{issue.owner.login}});
      if (issue.kind == IssueKind::kPullRequest) db.add("pull_request", {rid, n});
      for (size_t i = 0; i < issue.bodyAndComments.size(); ++i) {
        db.add("post", {rid, n, Value{static_cast<std::int64_t>(i)},
                        Value{issue.bodyAndComments[i].author.login}});
      }
    }
  }
  return db;
}

}  // namespace ethoscan::rules
