#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "ethoscan/errors.hpp"
#include "ethoscan/ingest.hpp"
#include "ethoscan/report.hpp"
#include "support/builders.hpp"

using namespace ethoscan;
using namespace ethoscan::ingest;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::kInternal;
}

constexpr const char* kLicense =
    "MIT License\n\nPermission is hereby granted, free of charge, to any person obtaining a copy\n";

// Replays a small repository over the REST paths the fetcher uses.
class MockApi {
 public:
  MockApi() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    base_ = "http://127.0.0.1:" + std::to_string(port_);
    routes();
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockApi() {
    server_.stop();
    thread_.join();
  }

  const std::string& base() const { return base_; }
  int requests() const { return requests_; }
  std::vector<std::pair<std::string, std::string>> auth_log() {
    std::lock_guard<std::mutex> lock(mu_);
    return auth_;
  }

  std::atomic<int> rate_limit_status{0};

 private:
  void json_reply(httplib::Response& res, const json& j) {
    res.set_content(j.dump(), "application/json");
  }

  void routes() {
    server_.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      {
        std::lock_guard<std::mutex> lock(mu_);
        auth_.emplace_back(req.path, req.get_header_value("Authorization"));
      }
      if (int s = rate_limit_status.load()) {
        res.status = s;
        res.set_header("x-ratelimit-remaining", "0");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
    server_.Get("/repos/o/r", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, {{"full_name", "o/r"}, {"fork", false}, {"homepage", ""}});
    });
    server_.Get("/repos/octo/empty-repo", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, {{"full_name", "octo/empty-repo"}, {"fork", false}});
    });
    server_.Get("/repos/outsider/tool", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, {{"full_name", "outsider/tool"}, {"fork", false}});
    });
    server_.Get("/repos/outsider/tool/contributors",
                [this](const httplib::Request&, httplib::Response& res) {
                  json_reply(res, json::array({{{"login", "outsider"}}}));
                });
    server_.Get("/repos/o/r/contents", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, json::array({{{"type", "file"}, {"path", "LICENSE"}, {"size", 0}},
                                   {{"type", "file"}, {"path", "README.md"}, {"size", 0}},
                                   {{"type", "dir"}, {"path", "src"}}}));
    });
    server_.Get("/repos/o/r/contents/src", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, json::array({{{"type", "file"}, {"path", "src/main.c"}, {"size", 0}},
                                   {{"type", "file"}, {"path", "src/logo.png"}, {"size", 4}}}));
    });
    server_.Get("/repos/o/r/contents/LICENSE", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kLicense, "text/plain");
    });
    server_.Get("/repos/o/r/contents/README.md", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("# r\n", "text/plain");
    });
    server_.Get("/repos/o/r/contents/src/main.c", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("int main(void) { return 0; }\n", "text/plain");
    });
    server_.Get("/repos/octo/empty-repo/contents", [](const httplib::Request&, httplib::Response& res) {
      res.status = 404;
    });
    server_.Get("/repos/o/r/commits", [this](const httplib::Request& req, httplib::Response& res) {
      EXPECT_EQ(req.get_param_value("path"), "LICENSE");
      json_reply(res, json::array({{{"sha", "bbbbbbb"},
                                    {"commit", {{"committer", {{"date", "2021-02-01T00:00:00Z"}}}}}},
                                   {{"sha", "aaaaaaa"},
                                    {"commit", {{"committer", {{"date", "2021-01-01T00:00:00Z"}}}}}}}));
    });
    server_.Get(R"(/repos/o/r/commits/([0-9a-f]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  json_reply(res, {{"files", json::array({{{"filename", "LICENSE"},
                                                           {"patch", "@@ -0,0 +1 @@\n+" +
                                                                         req.matches[1].str()}}})}});
                });
    server_.Get(R"(/repos/o/r/commits/([0-9a-f]+)/pulls)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  json_reply(res, req.matches[1] == "bbbbbbb" ? json::array({{{"number", 9}}})
                                                              : json::array());
                });
    for (const char* r : {"/repos/o/r/releases/latest", "/repos/octo/empty-repo/releases/latest"}) {
      server_.Get(r, [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    }
    server_.Get("/repos/o/r/contributors", [this](const httplib::Request& req, httplib::Response& res) {
      if (req.get_param_value("page") == "2") {
        json_reply(res, json::array({{{"login", "carol"}}}));
        return;
      }
      res.set_header("Link", "<" + base_ + "/repos/o/r/contributors?per_page=100&page=2>; rel=\"next\", <" +
                                 base_ + "/repos/o/r/contributors?per_page=100&page=2>; rel=\"last\"");
      json_reply(res, json::array({{{"login", "alice"}}, {{"login", "bob"}}}));
    });
    server_.Get("/repos/octo/empty-repo/contributors", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
    for (const char* r : {"/repos/o/r/forks", "/repos/octo/empty-repo/forks"}) {
      server_.Get(r, [this](const httplib::Request&, httplib::Response& res) {
        json_reply(res, json::array());
      });
    }
    server_.Get("/repos/o/r/issues", [this](const httplib::Request& req, httplib::Response& res) {
      EXPECT_EQ(req.get_param_value("state"), "all");
      json_reply(res, json::array(
                          {{{"number", 2},
                            {"user", {{"login", "outsider"}}},
                            {"body", "Use https://github.com/outsider/tool instead"},
                            {"comments", 1},
                            {"pull_request", {{"url", "x"}}}},
                           {{"number", 1}, {"user", {{"login", "alice"}}}, {"body", "crash"}, {"comments", 0}}}));
    });
    server_.Get("/repos/o/r/issues/2/comments", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, json::array({{{"user", {{"login", "alice"}}}, {"body", "thanks"}}}));
    });
    server_.Get("/repos/o/r/pulls/2/commits", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, json::array({{{"sha", "ccccccc"},
                                    {"commit", {{"committer", {{"date", "2021-03-01T00:00:00Z"}}}}}}}));
    });
    server_.Get("/page", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html>In-app purchases</html>", "text/html");
    });
    server_.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::string base_;
  std::atomic<int> requests_{0};
  std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> auth_;
};

FetchOptions options_for(const MockApi& api) {
  FetchOptions o;
  o.apiBase = api.base();
  return o;
}

}  // namespace

TEST(RequestGate, BudgetExhaustion) {
  RequestGate gate({2, 0});
  gate.acquire();
  gate.acquire();
  std::string msg;
  EXPECT_EQ(code_of([&] { gate.acquire(); }, &msg), ErrorCode::kBudgetExhausted);
  EXPECT_NE(msg.find("2 of 2"), std::string::npos) << msg;
  EXPECT_EQ(gate.used(), 2);
}

TEST(RequestGate, Pacing) {
  RequestGate gate({10, 25});
  auto start = std::chrono::steady_clock::now();
  std::vector<std::chrono::steady_clock::time_point> stamps;
  for (int i = 0; i < 4; ++i) {
    gate.acquire();
    stamps.push_back(std::chrono::steady_clock::now());
  }
  for (size_t i = 1; i < stamps.size(); ++i) {
    EXPECT_GE(stamps[i] - stamps[i - 1], std::chrono::milliseconds(25));
  }
  EXPECT_GE(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(75));
}

TEST(Fetcher, RepositoryWithTwoIssues) {
  MockApi api;
  auto transport = make_http_transport();
  RequestGate gate({500, 0});
  Fetcher f(*transport, gate, options_for(api));
  Snapshot s = f.fetch_repository("o", "r", Scope::kBoth);

  ASSERT_EQ(s.issues.size(), 2u);
  EXPECT_EQ(s.issues[0].number, 1);
  EXPECT_EQ(s.issues[1].kind, IssueKind::kPullRequest);
  EXPECT_EQ(s.issues[1].bodyAndComments.size(), 2u);
  ASSERT_EQ(s.issues[1].linkedCommits.size(), 1u);
  EXPECT_EQ(s.issues[1].linkedCommits[0].pullRequestCount, 1);

  EXPECT_EQ(s.repo.fileCount, 4);
  EXPECT_EQ(s.repo.find_file("src/main.c")->text(), "int main(void) { return 0; }\n");
  EXPECT_FALSE(s.repo.find_file("src/logo.png")->content.has_value());
  ASSERT_TRUE(s.repo.licenseFile);
  EXPECT_EQ(*s.repo.licenseFile->content, kLicense);
  ASSERT_TRUE(s.repo.readmeFile);
  EXPECT_EQ(s.repo.contributors.size(), 3u);  // second page followed
  EXPECT_FALSE(s.repo.latestRelease);

  ASSERT_EQ(s.repo.licenseCommits.size(), 2u);
  EXPECT_EQ(s.repo.licenseCommits[0].sha, "aaaaaaa");  // oldest first
  EXPECT_EQ(*s.repo.licenseCommits[1].codeChange, "--- a/LICENSE\n+++ b/LICENSE\n@@ -0,0 +1 @@\n+bbbbbbb");
  EXPECT_EQ(s.repo.licenseCommits[1].pullRequestCount, 1);

  ASSERT_EQ(s.relatedRepos.size(), 1u);
  EXPECT_EQ(s.relatedRepos[0].id().full(), "outsider/tool");
  EXPECT_TRUE(s.relatedRepos[0].contributors.count(UserRef{"outsider"}));

  // The result loads through the strict reader and builds a valid store.
  EXPECT_EQ(snapshot_from_json(to_json(s)), s);
  EXPECT_NO_THROW(make_store(s));
  EXPECT_EQ(gate.used(), api.requests());
}

TEST(Fetcher, EmptyRepository) {
  MockApi api;
  auto transport = make_http_transport();
  RequestGate gate({100, 0});
  Snapshot s = Fetcher(*transport, gate, options_for(api)).fetch_repository("octo", "empty-repo",
                                                                            Scope::kRepoLevel);
  EXPECT_EQ(s.repo.fileCount, 0);
  EXPECT_FALSE(s.repo.licenseFile);
  EXPECT_TRUE(s.issues.empty());
  EXPECT_EQ(s.scope, Scope::kRepoLevel);
}

TEST(Fetcher, BudgetOfOneIsExhausted) {
  MockApi api;
  std::string msg;
  EXPECT_EQ(code_of([&] { fetch_repository("o", "r", {1, 0}, Scope::kBoth, options_for(api)); }, &msg),
            ErrorCode::kBudgetExhausted);
  EXPECT_NE(msg.find("1 of 1"), std::string::npos) << msg;
  EXPECT_EQ(api.requests(), 1);
}

TEST(Fetcher, UnknownRepository) {
  MockApi api;
  EXPECT_EQ(code_of([&] { fetch_repository("no", "such", {50, 0}, Scope::kBoth, options_for(api)); }),
            ErrorCode::kNotFound);
}

TEST(Fetcher, RateLimitAndAuth) {
  MockApi api;
  api.rate_limit_status = 403;
  EXPECT_EQ(code_of([&] { fetch_repository("o", "r", {50, 0}, Scope::kBoth, options_for(api)); }),
            ErrorCode::kRateLimited);
  api.rate_limit_status = 429;
  EXPECT_EQ(code_of([&] { fetch_repository("o", "r", {50, 0}, Scope::kBoth, options_for(api)); }),
            ErrorCode::kRateLimited);
  api.rate_limit_status = 401;
  EXPECT_EQ(code_of([&] { fetch_repository("o", "r", {50, 0}, Scope::kBoth, options_for(api)); }),
            ErrorCode::kAuth);
}

TEST(Fetcher, TokenOnlyGoesToApi) {
  MockApi api;
  auto transport = make_http_transport();
  RequestGate gate({500, 0});
  FetchOptions o = options_for(api);
  o.apiBase = api.base() + "/repos";  // pages outside this prefix count as foreign
  o.token = "secret";
  o.allowedHosts = {"127.0.0.1"};
  Fetcher f(*transport, gate, o);
  EXPECT_EQ(f.fetch_external_page(api.base() + "/page"), "<html>In-app purchases</html>");
  for (const auto& [path, auth] : api.auth_log()) {
    if (path == "/page") EXPECT_TRUE(auth.empty());
  }
}

TEST(ExternalPages, AllowlistAndUnavailable) {
  MockApi api;
  FetchOptions o = options_for(api);
  o.allowedHosts = {"127.0.0.1"};
  EXPECT_EQ(fetch_external_page(api.base() + "/page#x", {5, 0}, o), "<html>In-app purchases</html>");
  EXPECT_FALSE(fetch_external_page(api.base() + "/missing", {5, 0}, o).has_value());

  auto before = HttpTransport::constructed();
  EXPECT_EQ(code_of([&] { fetch_external_page("https://blog.example.org/post", {5, 0}); }),
            ErrorCode::kDisallowedHost);
  EXPECT_EQ(HttpTransport::constructed(), before);
}

TEST(Offline, SnapshotPathConstructsNoClient) {
  auto before = HttpTransport::constructed();
  Snapshot s = testsupport::load_fixture("s1_all_conditions");
  report::CheckInput in;
  in.primary = &s;
  in.requestedTypes = {"all"};
  auto r = report::run_check(in, testsupport::context());
  EXPECT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(HttpTransport::constructed(), before);
}
