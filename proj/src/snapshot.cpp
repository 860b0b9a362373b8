#include "ethoscan/snapshot.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kFormat, "snapshot schema error at '" + where + "': " + what);
}

// Reads the fields of one JSON object and, on finish(), rejects any it did
// not consume.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) schema_error(where_, "expected an object");
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  const json& required(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) schema_error(path(key), "missing field");
    seen_.insert(key);
    return *it;
  }

  const json* optional(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  std::string string(const std::string& key) {
    const json& v = required(key);
    if (!v.is_string()) schema_error(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::optional<std::string> nullable_string(const std::string& key) {
    const json& v = required(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) schema_error(path(key), "expected a string or null");
    return v.get<std::string>();
  }

  std::int64_t integer(const std::string& key, std::int64_t min = 0) {
    const json& v = required(key);
    if (!v.is_number_integer()) schema_error(path(key), "expected an integer");
    auto value = v.get<std::int64_t>();
    if (value < min) schema_error(path(key), "must be >= " + std::to_string(min));
    return value;
  }

  bool boolean(const std::string& key) {
    const json& v = required(key);
    if (!v.is_boolean()) schema_error(path(key), "expected a boolean");
    return v.get<bool>();
  }

  const json& array(const std::string& key) {
    const json& v = required(key);
    if (!v.is_array()) schema_error(path(key), "expected an array");
    return v;
  }

  template <class F>
  auto guarded(const std::string& key, F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      if (std::string_view(e.what()).rfind("snapshot schema error", 0) == 0) throw;
      schema_error(path(key), e.what());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) schema_error(path(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json file_to_json(const FileContent& f) {
  json j = {{"path", f.path}, {"contentCount", f.contentCount}};
  if (!f.content) {
    j["content"] = nullptr;
  } else if (text::is_valid_utf8(*f.content)) {
    j["content"] = *f.content;
  } else {
    j["content"] = text::base64_encode(*f.content);
    j["contentEncoding"] = "base64";
  }
  return j;
}

FileContent file_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  FileContent f;
  f.path = r.string("path");
  f.contentCount = r.integer("contentCount");
  f.content = r.nullable_string("content");
  if (const json* enc = r.optional("contentEncoding")) {
    if (*enc != "base64") schema_error(r.path("contentEncoding"), "only \"base64\" is allowed");
    if (!f.content) schema_error(r.path("contentEncoding"), "set on a null content");
    f.content = r.guarded("content", [&] { return text::base64_decode(*f.content); });
  }
  r.finish();
  return f;
}

json optional_file(const std::optional<FileContent>& f) {
  return f ? file_to_json(*f) : json(nullptr);
}

std::optional<FileContent> optional_file_from(ObjectReader& r, const std::string& key) {
  const json& v = r.required(key);
  if (v.is_null()) return std::nullopt;
  return file_from_json(v, r.path(key));
}

json commit_to_json(const CommitInfo& c) {
  return {{"sha", c.sha},
          {"timestamp", format_timestamp(c.timestamp)},
          {"codeChange", c.codeChange ? json(*c.codeChange) : json(nullptr)},
          {"pullRequestCount", c.pullRequestCount}};
}

CommitInfo commit_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  CommitInfo c;
  c.sha = r.string("sha");
  c.timestamp = r.guarded("timestamp", [&] { return parse_timestamp(r.string("timestamp")); });
  c.codeChange = r.nullable_string("codeChange");
  c.pullRequestCount = r.integer("pullRequestCount");
  r.finish();
  return c;
}

json repo_to_json(const RepositoryFacts& r) {
  json files = json::array();
  for (const auto& f : r.files) files.push_back(file_to_json(f));
  json contributors = json::array();
  for (const auto& u : r.contributors) contributors.push_back(u.login);
  json commits = json::array();
  for (const auto& c : r.licenseCommits) commits.push_back(commit_to_json(c));
  json release = nullptr;
  if (r.latestRelease) {
    release = {{"tag", r.latestRelease->tag},
               {"publishedDate", format_date(r.latestRelease->publishedDate)}};
  }
  return {{"owner", r.owner},
          {"name", r.name},
          {"isFork", r.isFork},
          {"parentFullName", r.parentFullName ? json(*r.parentFullName) : json(nullptr)},
          {"forkList", r.forkList},
          {"fileCount", r.fileCount},
          {"files", files},
          {"licenseFile", optional_file(r.licenseFile)},
          {"readmeFile", optional_file(r.readmeFile)},
          {"changelogFile", optional_file(r.changelogFile)},
          {"contributors", contributors},
          {"latestRelease", release},
          {"licenseCommits", commits},
          {"externalLinks", r.externalLinks}};
}

std::vector<std::string> string_list(ObjectReader& r, const std::string& key) {
  std::vector<std::string> out;
  const json& arr = r.array(key);
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) schema_error(r.path(key) + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

RepositoryFacts repo_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  RepositoryFacts repo;
  repo.owner = r.string("owner");
  repo.name = r.string("name");
  repo.isFork = r.boolean("isFork");
  repo.parentFullName = r.nullable_string("parentFullName");
  repo.forkList = string_list(r, "forkList");
  repo.fileCount = r.integer("fileCount");
  const json& files = r.array("files");
  for (size_t i = 0; i < files.size(); ++i) {
    repo.files.push_back(file_from_json(files[i], r.path("files") + "[" + std::to_string(i) + "]"));
  }
  repo.licenseFile = optional_file_from(r, "licenseFile");
  repo.readmeFile = optional_file_from(r, "readmeFile");
  repo.changelogFile = optional_file_from(r, "changelogFile");
  for (auto& login : string_list(r, "contributors")) {
    if (login.empty()) schema_error(r.path("contributors"), "empty login");
    repo.contributors.insert(UserRef{std::move(login)});
  }
  const json& release = r.required("latestRelease");
  if (!release.is_null()) {
    ObjectReader rr(release, r.path("latestRelease"));
    ReleaseInfo info;
    info.tag = rr.string("tag");
    info.publishedDate =
        rr.guarded("publishedDate", [&] { return parse_date(rr.string("publishedDate")); });
    rr.finish();
    repo.latestRelease = info;
  }
  const json& commits = r.array("licenseCommits");
  for (size_t i = 0; i < commits.size(); ++i) {
    repo.licenseCommits.push_back(
        commit_from_json(commits[i], r.path("licenseCommits") + "[" + std::to_string(i) + "]"));
  }
  repo.externalLinks = string_list(r, "externalLinks");
  r.finish();
  return repo;
}

json issue_to_json(const IssueFacts& issue) {
  json posts = json::array();
  for (const auto& p : issue.bodyAndComments) {
    posts.push_back({{"author", p.author.login}, {"text", p.text}});
  }
  json commits = json::array();
  for (const auto& c : issue.linkedCommits) commits.push_back(commit_to_json(c));
  return {{"repo", issue.repo.full()},
          {"number", issue.number},
          {"kind", issue.kind == IssueKind::kIssue ? "issue" : "pullRequest"},
          {"owner", issue.owner.login},
          {"bodyAndComments", posts},
          {"linkedCommits", commits}};
}

IssueFacts issue_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  IssueFacts issue;
  issue.repo = r.guarded("repo", [&] { return RepoId::parse(r.string("repo")); });
  issue.number = r.integer("number", 1);
  std::string kind = r.string("kind");
  if (kind == "issue") {
    issue.kind = IssueKind::kIssue;
  } else if (kind == "pullRequest") {
    issue.kind = IssueKind::kPullRequest;
  } else {
    schema_error(r.path("kind"), "expected \"issue\" or \"pullRequest\"");
  }
  issue.owner.login = r.string("owner");
  const json& posts = r.array("bodyAndComments");
  for (size_t i = 0; i < posts.size(); ++i) {
    ObjectReader pr(posts[i], r.path("bodyAndComments") + "[" + std::to_string(i) + "]");
    issue.bodyAndComments.push_back(Post{UserRef{pr.string("author")}, pr.string("text")});
    pr.finish();
  }
  const json& commits = r.array("linkedCommits");
  for (size_t i = 0; i < commits.size(); ++i) {
    issue.linkedCommits.push_back(
        commit_from_json(commits[i], r.path("linkedCommits") + "[" + std::to_string(i) + "]"));
  }
  r.finish();
  return issue;
}

}  // namespace

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::kRepoLevel: return "repoLevel";
    case Scope::kIssueLevel: return "issueLevel";
    case Scope::kBoth: return "both";
  }
  return "both";
}

std::optional<Scope> parse_scope(std::string_view s) {
  if (s == "repoLevel") return Scope::kRepoLevel;
  if (s == "issueLevel") return Scope::kIssueLevel;
  if (s == "both") return Scope::kBoth;
  return std::nullopt;
}

FactStore make_store(const Snapshot& s) { return make_store(std::vector<const Snapshot*>{&s}); }

FactStore make_store(const std::vector<const Snapshot*>& snapshots) {
  std::vector<RepositoryFacts> repos;
  std::vector<IssueFacts> issues;
  std::set<RepoId> seen;
  auto add = [&](const RepositoryFacts& r) {
    if (seen.insert(r.id()).second) repos.push_back(r);
  };
  for (const Snapshot* s : snapshots) add(s->repo);
  for (const Snapshot* s : snapshots) {
    for (const auto& r : s->relatedRepos) add(r);
  }
  std::set<std::pair<RepoId, std::int64_t>> seen_issues;
  for (const Snapshot* s : snapshots) {
    for (const auto& issue : s->issues) {
      if (seen_issues.insert({issue.repo, issue.number}).second) issues.push_back(issue);
    }
  }
  return FactStore(std::move(repos), std::move(issues));
}

nlohmann::json to_json(const Snapshot& s) {
  json issues = json::array();
  for (const auto& issue : s.issues) issues.push_back(issue_to_json(issue));
  json related = json::array();
  for (const auto& r : s.relatedRepos) related.push_back(repo_to_json(r));
  json pages = json::object();
  for (const auto& [url, page] : s.externalPages) pages[url] = page ? json(*page) : json(nullptr);
  return {{"formatVersion", s.formatVersion},
          {"capturedAt", format_timestamp(s.capturedAt)},
          {"scope", to_string(s.scope)},
          {"repo", repo_to_json(s.repo)},
          {"issues", issues},
          {"relatedRepos", related},
          {"externalPages", pages}};
}

Snapshot snapshot_from_json(const nlohmann::json& j) {
  ObjectReader r(j, "$");
  Snapshot s;
  // Version first, so a future format fails with a version error rather than
  // a confusing field error.
  const json& version = r.required("formatVersion");
  if (!version.is_number_integer()) schema_error("$.formatVersion", "expected an integer");
  if (version.get<std::int64_t>() != kSnapshotFormatVersion) {
    throw Error(ErrorCode::kFormat, "snapshot format version mismatch: file has " +
                                        version.dump() + ", supported is " +
                                        std::to_string(kSnapshotFormatVersion));
  }
  s.formatVersion = kSnapshotFormatVersion;
  s.capturedAt = r.guarded("capturedAt", [&] { return parse_timestamp(r.string("capturedAt")); });
  auto scope = parse_scope(r.string("scope"));
  if (!scope) schema_error("$.scope", "expected repoLevel, issueLevel or both");
  s.scope = *scope;
  s.repo = repo_from_json(r.required("repo"), "$.repo");
  const json& issues = r.array("issues");
  for (size_t i = 0; i < issues.size(); ++i) {
    s.issues.push_back(issue_from_json(issues[i], "$.issues[" + std::to_string(i) + "]"));
  }
  const json& related = r.array("relatedRepos");
  for (size_t i = 0; i < related.size(); ++i) {
    s.relatedRepos.push_back(repo_from_json(related[i], "$.relatedRepos[" + std::to_string(i) + "]"));
  }
  const json& pages = r.required("externalPages");
  if (!pages.is_object()) schema_error("$.externalPages", "expected an object");
  for (auto it = pages.begin(); it != pages.end(); ++it) {
    if (it->is_null()) {
      s.externalPages[it.key()] = std::nullopt;
    } else if (it->is_string()) {
      s.externalPages[it.key()] = it->get<std::string>();
    } else {
      schema_error("$.externalPages[" + it.key() + "]", "expected a string or null");
    }
  }
  r.finish();
  for (const auto& issue : s.issues) {
    if (issue.repo != s.repo.id()) {
      schema_error("$.issues", "issue #" + std::to_string(issue.number) +
                                   " belongs to " + issue.repo.full() + ", not the snapshot repo");
    }
  }
  // Model invariants (root license path, sorted commits, ...).
  make_store(s);
  return s;
}

void save_snapshot(const Snapshot& s, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << to_json(s).dump(2, ' ', false, json::error_handler_t::replace) << '\n';
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move snapshot into place at " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return snapshot_from_json(j);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace ethoscan
