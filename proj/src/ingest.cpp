#include "ethoscan/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <thread>

#include "ethoscan/errors.hpp"
#include "ethoscan/license.hpp"
#include "ethoscan/links.hpp"
#include "ethoscan/similarity.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::ingest {
namespace {

using nlohmann::json;

constexpr const char* kJsonMedia = "application/vnd.github+json";
constexpr const char* kRawMedia = "application/vnd.github.raw";

std::string encode_path(std::string_view path) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string with_query(const std::string& path, const std::string& query) {
  return path + (path.find('?') == std::string::npos ? "?" : "&") + query;
}

std::optional<std::string> next_link(const std::string& header) {
  for (const auto& part : text::split(header, ',')) {
    if (part.find("rel=\"next\"") == std::string::npos) continue;
    size_t open = part.find('<');
    size_t close = part.find('>', open);
    if (open != std::string::npos && close != std::string::npos) {
      return part.substr(open + 1, close - open - 1);
    }
  }
  return std::nullopt;
}

json parse_body(const HttpResponse& r, const std::string& what) {
  try {
    return json::parse(r.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kNetwork, "unparsable response for " + what + ": " + e.what());
  }
}

std::string str_or(const json& j, const char* key, std::string fallback = {}) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : fallback;
}

const FileContent* first_root_match(const std::vector<FileContent>& files,
                                    const std::vector<std::string>& names) {
  for (const auto& n : names) {
    for (const auto& f : files) {
      if (text::is_root_path(f.path) && text::to_lower_ascii(f.path) == text::to_lower_ascii(n)) {
        return &f;
      }
    }
  }
  return nullptr;
}

}  // namespace

RequestGate::RequestGate(FetchBudget budget) : budget_(budget) {
  if (budget.maxRequests <= 0 || budget.minIntervalMs < 0) {
    throw Error(ErrorCode::kUsage, "fetch budget needs maxRequests > 0 and minIntervalMs >= 0");
  }
}

void RequestGate::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  if (used_ >= budget_.maxRequests) {
    throw Error(ErrorCode::kBudgetExhausted,
                "request budget exhausted: " + std::to_string(used_) + " of " +
                    std::to_string(budget_.maxRequests) + " requests used");
  }
  auto now = std::chrono::steady_clock::now();
  if (last_) {
    auto ready = *last_ + std::chrono::milliseconds(budget_.minIntervalMs);
    if (now < ready) {
      std::this_thread::sleep_until(ready);
      now = std::chrono::steady_clock::now();
    }
  }
  last_ = now;
  ++used_;
}

std::int64_t RequestGate::used() const {
  std::lock_guard<std::mutex> lock(mu_);
  return used_;
}

std::string HttpResponse::header(const std::string& name) const {
  auto it = headers.find(text::to_lower_ascii(name));
  return it == headers.end() ? std::string() : it->second;
}

Fetcher::Fetcher(HttpTransport& transport, RequestGate& gate, FetchOptions options)
    : transport_(transport), gate_(gate), options_(std::move(options)) {
  while (!options_.apiBase.empty() && options_.apiBase.back() == '/') options_.apiBase.pop_back();
  if (!options_.token) {
    if (const char* t = std::getenv("ETHOSCAN_TOKEN"); t && *t) options_.token = t;
  }
}

HttpResponse Fetcher::request(const std::string& url, const std::string& accept) {
  gate_.acquire();
  std::map<std::string, std::string> headers;
  if (!accept.empty()) headers["Accept"] = accept;
  // Credentials only ever go to the API host.
  if (options_.token && url.rfind(options_.apiBase, 0) == 0) {
    headers["Authorization"] = "Bearer " + *options_.token;
    headers["X-GitHub-Api-Version"] = "2022-11-28";
  }
  return transport_.get(url, headers);
}

HttpResponse Fetcher::api(const std::string& path, const std::string& accept) {
  return request(options_.apiBase + path, accept.empty() ? kJsonMedia : accept);
}

void Fetcher::fail(const HttpResponse& r, const std::string& what) {
  std::string used = std::to_string(gate_.used());
  if (r.status == 401) {
    throw Error(ErrorCode::kAuth, "authentication failed (HTTP 401) for " + what +
                                      "; check ETHOSCAN_TOKEN");
  }
  if (r.status == 429 || (r.status == 403 && r.header("x-ratelimit-remaining") == "0")) {
    throw Error(ErrorCode::kRateLimited,
                "API rate limit reached for " + what + " after " + used + " requests");
  }
  if (r.status == 404) throw Error(ErrorCode::kNotFound, what + " not found");
  throw Error(ErrorCode::kNetwork, "HTTP " + std::to_string(r.status) + " for " + what);
}

std::vector<json> Fetcher::paginate(const std::string& path) {
  std::vector<json> items;
  HttpResponse r = api(with_query(path, "per_page=100"));
  while (true) {
    if (r.status == 204) break;
    if (r.status != 200) fail(r, path);
    json page = parse_body(r, path);
    if (!page.is_array()) throw Error(ErrorCode::kNetwork, "expected a list from " + path);
    for (auto& item : page) items.push_back(std::move(item));
    auto next = next_link(r.header("link"));
    if (!next) break;
    r = request(*next, kJsonMedia);
  }
  return items;
}

std::optional<std::string> Fetcher::fetch_external_page(const std::string& url) {
  std::string host = links::host_of(url);
  if (host.empty() || !options_.allowedHosts.count(host)) {
    throw Error(ErrorCode::kDisallowedHost,
                "host '" + host + "' is not on the external page allowlist: " + url);
  }
  std::string target = url.substr(0, url.find('#'));
  HttpResponse r = request(target, "text/html");
  if (r.status != 200) return std::nullopt;
  return r.body;
}

std::optional<RepositoryFacts> Fetcher::fetch_related_repo(const RepoId& id) {
  std::string base = "/repos/" + encode_path(id.owner) + "/" + encode_path(id.name);
  HttpResponse meta = api(base);
  if (meta.status == 404) return std::nullopt;
  if (meta.status != 200) fail(meta, id.full());
  json m = parse_body(meta, id.full());
  RepositoryFacts r;
  // The API canonicalizes case; keep the spelling the link used so lookups
  // from issue text resolve.
  r.owner = id.owner;
  r.name = id.name;
  r.isFork = m.value("fork", false);
  for (const auto& c : paginate(base + "/contributors")) {
    std::string login = str_or(c, "login");
    if (!login.empty()) r.contributors.insert(UserRef{login});
  }
  return r;
}

Snapshot Fetcher::fetch_repository(const std::string& owner, const std::string& name,
                                   Scope scope) {
  const RepoId id{owner, name};
  const std::string base = "/repos/" + encode_path(owner) + "/" + encode_path(name);
  std::vector<std::string> missing;

  Snapshot snap;
  snap.scope = scope;
  snap.capturedAt =
      Timestamp{std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now())};
  RepositoryFacts& repo = snap.repo;
  repo.owner = owner;
  repo.name = name;

  HttpResponse meta_r = api(base);
  if (meta_r.status == 404) throw Error(ErrorCode::kNotFound, "repository " + id.full() + " not found");
  if (meta_r.status != 200) fail(meta_r, "repository " + id.full());
  json meta = parse_body(meta_r, id.full());
  repo.isFork = meta.value("fork", false);
  if (meta.contains("parent") && meta["parent"].is_object()) {
    repo.parentFullName = str_or(meta["parent"], "full_name");
  }
  if (std::string home = str_or(meta, "homepage"); !home.empty()) repo.externalLinks.push_back(home);

  // File tree through the contents endpoint.
  std::deque<std::string> dirs = {""};
  while (!dirs.empty()) {
    std::string dir = dirs.front();
    dirs.pop_front();
    HttpResponse r = api(base + "/contents" + (dir.empty() ? "" : "/" + encode_path(dir)));
    if (r.status == 404 && dir.empty()) break;  // empty repository
    if (r.status != 200) {
      if (r.status == 401 || r.status == 403 || r.status == 429) fail(r, "contents of " + id.full());
      missing.push_back("directory listing '" + dir + "'");
      continue;
    }
    json listing = parse_body(r, "contents/" + dir);
    if (!listing.is_array()) continue;
    for (const auto& e : listing) {
      std::string type = str_or(e, "type");
      std::string path = str_or(e, "path");
      if (type == "dir") {
        dirs.push_back(path);
      } else if (type == "file" || type == "symlink") {
        repo.files.push_back(FileContent{path, std::nullopt, e.value("size", std::int64_t{0})});
      }
    }
  }
  std::sort(repo.files.begin(), repo.files.end(),
            [](const FileContent& a, const FileContent& b) { return a.path < b.path; });
  for (auto& f : repo.files) {
    if (!text::is_root_path(f.path) &&
        !similarity::is_source_path(f.path, similarity::default_source_extensions())) {
      continue;
    }
    HttpResponse r = api(base + "/contents/" + encode_path(f.path), kRawMedia);
    if (r.status != 200) {
      if (r.status == 401 || r.status == 403 || r.status == 429) fail(r, f.path);
      missing.push_back("content of '" + f.path + "'");
      continue;
    }
    f.content = r.body;
    f.contentCount = static_cast<std::int64_t>(r.body.size());
  }
  repo.fileCount = static_cast<std::int64_t>(repo.files.size());
  if (auto* f = first_root_match(repo.files, license::license_file_names())) repo.licenseFile = *f;
  if (auto* f = first_root_match(repo.files, license::readme_file_names())) repo.readmeFile = *f;
  if (auto* f = first_root_match(repo.files, license::changelog_file_names())) repo.changelogFile = *f;

  // History of the license file, oldest first.
  if (repo.licenseFile) {
    const std::string& lpath = repo.licenseFile->path;
    auto commits = paginate(base + "/commits?path=" + encode_path(lpath));
    std::reverse(commits.begin(), commits.end());
    std::set<std::string> seen;
    for (const auto& c : commits) {
      std::string sha = str_or(c, "sha");
      if (sha.empty() || !seen.insert(sha).second) continue;
      CommitInfo info;
      info.sha = sha;
      std::string date;
      if (c.contains("commit") && c["commit"].contains("committer")) {
        date = str_or(c["commit"]["committer"], "date");
      }
      info.timestamp = date.empty() ? Timestamp{} : parse_timestamp(date);
      HttpResponse d = api(base + "/commits/" + sha);
      if (d.status == 200) {
        json detail = parse_body(d, "commit " + sha);
        for (const auto& f : detail.value("files", json::array())) {
          if (str_or(f, "filename") != lpath && str_or(f, "previous_filename") != lpath) continue;
          if (f.contains("patch") && f["patch"].is_string()) {
            info.codeChange = "--- a/" + lpath + "\n+++ b/" + lpath + "\n" +
                              f["patch"].get<std::string>();
          }
        }
      }
      if (!info.codeChange) missing.push_back("diff of commit " + sha);
      HttpResponse p = api(base + "/commits/" + sha + "/pulls");
      if (p.status == 200) {
        json pulls = parse_body(p, "pulls of " + sha);
        info.pullRequestCount = pulls.is_array() ? static_cast<std::int64_t>(pulls.size()) : 0;
      } else {
        missing.push_back("pull requests of commit " + sha);
      }
      repo.licenseCommits.push_back(std::move(info));
    }
    std::stable_sort(repo.licenseCommits.begin(), repo.licenseCommits.end(),
                     [](const CommitInfo& a, const CommitInfo& b) { return a.timestamp < b.timestamp; });
  }

  HttpResponse rel = api(base + "/releases/latest");
  if (rel.status == 200) {
    json j = parse_body(rel, "latest release");
    std::string published = str_or(j, "published_at");
    if (!published.empty()) {
      repo.latestRelease = ReleaseInfo{str_or(j, "tag_name"), parse_timestamp(published).date()};
    }
  } else if (rel.status != 404) {
    fail(rel, "latest release of " + id.full());
  }

  for (const auto& c : paginate(base + "/contributors")) {
    std::string login = str_or(c, "login");
    if (!login.empty()) repo.contributors.insert(UserRef{login});
  }
  for (const auto& f : paginate(base + "/forks")) {
    std::string full = str_or(f, "full_name");
    if (!full.empty() && full != id.full()) repo.forkList.push_back(full);
  }

  if (covers_issues(scope)) {
    for (const auto& i : paginate(base + "/issues?state=all")) {
      IssueFacts issue;
      issue.repo = id;
      issue.number = i.value("number", std::int64_t{0});
      issue.kind = i.contains("pull_request") ? IssueKind::kPullRequest : IssueKind::kIssue;
      issue.owner = UserRef{i.contains("user") && i["user"].is_object() ? str_or(i["user"], "login") : ""};
      issue.bodyAndComments.push_back(Post{issue.owner, str_or(i, "body")});
      if (i.value("comments", 0) > 0) {
        for (const auto& c : paginate(base + "/issues/" + std::to_string(issue.number) + "/comments")) {
          std::string author = c.contains("user") && c["user"].is_object() ? str_or(c["user"], "login") : "";
          issue.bodyAndComments.push_back(Post{UserRef{author}, str_or(c, "body")});
        }
      }
      if (issue.kind == IssueKind::kPullRequest) {
        for (const auto& c : paginate(base + "/pulls/" + std::to_string(issue.number) + "/commits")) {
          CommitInfo info;
          info.sha = str_or(c, "sha");
          std::string date;
          if (c.contains("commit") && c["commit"].contains("committer")) {
            date = str_or(c["commit"]["committer"], "date");
          }
          info.timestamp = date.empty() ? Timestamp{} : parse_timestamp(date);
          info.pullRequestCount = 1;
          issue.linkedCommits.push_back(std::move(info));
        }
      }
      snap.issues.push_back(std::move(issue));
    }
    std::sort(snap.issues.begin(), snap.issues.end(),
              [](const IssueFacts& a, const IssueFacts& b) { return a.number < b.number; });

    std::vector<std::string> patterns = {links::default_so_link_pattern()};
    if (!options_.soLinkPattern.empty()) patterns.push_back(options_.soLinkPattern);
    std::set<RepoId> related;
    for (const auto& issue : snap.issues) {
      for (const auto& post : issue.bodyAndComments) {
        for (const auto& pattern : patterns) {
          for (const auto& link : links::find_links(post.text, pattern)) {
            if (!snap.externalPages.count(link)) snap.externalPages[link] = fetch_external_page(link);
          }
        }
      }
      std::vector<RepoId> candidates;
      for (const auto& post : issue.bodyAndComments) {
        if (post.author != issue.owner) continue;
        for (const auto& link : links::find_repo_links(post.text)) {
          auto r2 = links::repo_of_link(link);
          if (!r2 || *r2 == id) continue;
          if (std::find(candidates.begin(), candidates.end(), *r2) == candidates.end() &&
              candidates.size() < options_.maxRepoLinksPerIssue) {
            candidates.push_back(*r2);
          }
        }
      }
      for (const auto& r2 : candidates) {
        if (!related.insert(r2).second) continue;
        if (auto facts = fetch_related_repo(r2)) snap.relatedRepos.push_back(std::move(*facts));
      }
    }
  }

  std::vector<std::string> store_sources = repo.externalLinks;
  if (repo.readmeFile) store_sources.push_back(repo.readmeFile->text());
  for (const auto& src : store_sources) {
    for (const auto& link : links::find_store_links(src)) {
      if (!snap.externalPages.count(link)) snap.externalPages[link] = fetch_external_page(link);
    }
  }

  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : "; ") + m;
    throw Error(ErrorCode::kPartialFetch, "incomplete fetch of " + id.full() + ", missing: " + list);
  }
  // Whatever we produce must load back through the strict reader.
  return snapshot_from_json(to_json(snap));
}

Snapshot fetch_repository(const std::string& owner, const std::string& name, FetchBudget budget,
                          Scope scope, FetchOptions options) {
  RequestGate gate(budget);
  auto transport = make_http_transport();
  return Fetcher(*transport, gate, std::move(options)).fetch_repository(owner, name, scope);
}

std::optional<std::string> fetch_external_page(const std::string& url, FetchBudget budget,
                                               FetchOptions options) {
  RequestGate gate(budget);
  // Host check first so a rejected URL never builds a client.
  std::string host = links::host_of(url);
  if (host.empty() || !options.allowedHosts.count(host)) {
    throw Error(ErrorCode::kDisallowedHost,
                "host '" + host + "' is not on the external page allowlist: " + url);
  }
  auto transport = make_http_transport();
  return Fetcher(*transport, gate, std::move(options)).fetch_external_page(url);
}

}  // namespace ethoscan::ingest
