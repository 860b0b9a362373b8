#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ethoscan/snapshot.hpp"

namespace ethoscan::ingest {

struct FetchBudget {
  std::int64_t maxRequests = 5000;
  std::int64_t minIntervalMs = 0;
};

/// Shared request counter and pacer. Every live request goes through
/// acquire(), which blocks until minIntervalMs has passed since the previous
/// request and throws Error(kBudgetExhausted) once maxRequests are spent.
class RequestGate {
 public:
  explicit RequestGate(FetchBudget budget);

  void acquire();
  std::int64_t used() const;
  const FetchBudget& budget() const { return budget_; }

 private:
  FetchBudget budget_;
  mutable std::mutex mu_;
  std::int64_t used_ = 0;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;

  std::string header(const std::string& name) const;
};

class HttpTransport {
 public:
  HttpTransport();
  virtual ~HttpTransport() = default;
  HttpTransport(const HttpTransport&) = delete;
  HttpTransport& operator=(const HttpTransport&) = delete;

  /// Throws Error(kNetwork) when no response arrives.
  virtual HttpResponse get(const std::string& url,
                           const std::map<std::string, std::string>& headers) = 0;

  /// Number of transports ever constructed in this process.
  static std::int64_t constructed();
};

/// Transport backed by cpp-httplib (HTTPS through OpenSSL).
std::unique_ptr<HttpTransport> make_http_transport();

struct FetchOptions {
  std::string apiBase = "https://api.github.com";
  std::optional<std::string> token;  // defaults to $ETHOSCAN_TOKEN
  /// Hosts fetch_external_page may contact.
  std::set<std::string> allowedHosts = {"stackoverflow.com", "www.stackoverflow.com",
                                        "play.google.com"};
  std::string soLinkPattern;  // empty: the default pattern
  /// Bound on candidate repository links resolved per issue.
  size_t maxRepoLinksPerIssue = 10;
};

/// Live client over the REST v3 API.
class Fetcher {
 public:
  Fetcher(HttpTransport& transport, RequestGate& gate, FetchOptions options = {});

  /// Root contents, every source file, the license file history, latest
  /// release, contributors, forks and, for issue scopes, every issue and pull
  /// request with comments. Also caches the external pages and related
  /// repositories the detectors need.
  Snapshot fetch_repository(const std::string& owner, const std::string& name, Scope scope);

  /// Page text, or nullopt when the host answered with an HTTP error.
  /// Throws Error(kDisallowedHost) for hosts off the allowlist.
  std::optional<std::string> fetch_external_page(const std::string& url);

  /// Contributors of another repository; nullopt when it does not exist.
  std::optional<RepositoryFacts> fetch_related_repo(const RepoId& id);

 private:
  HttpResponse request(const std::string& url, const std::string& accept);
  HttpResponse api(const std::string& path, const std::string& accept = {});
  std::vector<nlohmann::json> paginate(const std::string& path);
  [[noreturn]] void fail(const HttpResponse& r, const std::string& what);

  HttpTransport& transport_;
  RequestGate& gate_;
  FetchOptions options_;
};

/// Convenience wrappers that build their own transport and gate.
Snapshot fetch_repository(const std::string& owner, const std::string& name, FetchBudget budget,
                          Scope scope, FetchOptions options = {});
std::optional<std::string> fetch_external_page(const std::string& url, FetchBudget budget,
                                               FetchOptions options = {});

}  // namespace ethoscan::ingest
