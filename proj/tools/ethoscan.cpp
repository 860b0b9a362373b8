#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ethoscan/ethoscan.h"

namespace {

constexpr int kExitError = 2;

struct Handles {
  ethoscan_config* config = nullptr;
  ethoscan_snapshot* primary = nullptr;
  ethoscan_snapshot* pair = nullptr;
  ethoscan_report* report = nullptr;

  ~Handles() {
    ethoscan_report_free(report);
    ethoscan_snapshot_free(pair);
    ethoscan_snapshot_free(primary);
    ethoscan_config_free(config);
  }
};

class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(ethoscan_status s) {
  if (s != ETHOSCAN_OK) {
    throw Failure(std::string(ethoscan_status_name(s)) + ": " + ethoscan_last_error());
  }
}

struct LiveOptions {
  long long maxRequests = 0;  // 0: 5000 with a token, 60 without
  long long minIntervalMs = 0;
  std::string apiBase;

  long long budget() const {
    if (maxRequests > 0) return maxRequests;
    const char* token = std::getenv("ETHOSCAN_TOKEN");
    return token && *token ? 5000 : 60;
  }
};

void add_live_options(CLI::App* cmd, LiveOptions& live) {
  cmd->add_option("--max-requests", live.maxRequests,
                  "request budget for live fetching (default 5000 with ETHOSCAN_TOKEN, else 60)");
  cmd->add_option("--min-interval-ms", live.minIntervalMs, "minimum spacing between live requests");
  cmd->add_option("--api-base", live.apiBase, "REST API base URL");
}

bool split_repo(const std::string& text, std::string& owner, std::string& name) {
  static const std::regex re(R"(^([A-Za-z0-9][A-Za-z0-9-]*)/([A-Za-z0-9._-]+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) return false;
  owner = m[1];
  name = m[2];
  return true;
}

ethoscan_snapshot* fetch(const std::string& repo, const char* scope, const LiveOptions& live) {
  std::string owner, name;
  if (!split_repo(repo, owner, name)) throw Failure("usage: expected OWNER/NAME, got '" + repo + "'");
  ethoscan_snapshot* s = nullptr;
  check(ethoscan_snapshot_fetch(owner.c_str(), name.c_str(), scope, live.budget(), live.minIntervalMs,
                                live.apiBase.empty() ? nullptr : live.apiBase.c_str(), &s));
  return s;
}

ethoscan_snapshot* load(const std::string& path) {
  ethoscan_snapshot* s = nullptr;
  check(ethoscan_snapshot_load(path.c_str(), &s));
  return s;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure("io: cannot write " + path);
  out << text;
}

struct CheckArgs {
  std::string repo;
  std::string snapshot;
  std::string issue;
  std::string pair;
  std::vector<std::string> types;
  std::string format = "text";
  std::string date;
  std::string output;
  std::string saveSnapshot;
  std::string s1Threshold;
  std::string s9StaleDays;
  std::string excludedSegments;
  std::string soLinkPattern;
  bool strictSoLinks = false;
  bool s2Fuzzy = false;
  std::string gramLength;
  std::string winnowWindow;
  std::string extensions;
  std::string licenses;
  std::string rulesDir;
  std::vector<std::string> extraRules;
  bool timings = false;
  LiveOptions live;
};

int run_check(const CheckArgs& a) {
  int sources = !a.repo.empty() + !a.snapshot.empty();
  std::optional<std::string> issue_number;
  std::string issue_repo;
  if (!a.issue.empty()) {
    static const std::regex url(R"(^https?://(?:www\.)?github\.com/([^/]+)/([^/]+)/(?:issues|pull)/(\d+)/?$)");
    static const std::regex short_form(R"(^([^/#\s]+)/([^/#\s]+)#(\d+)$)");
    static const std::regex number(R"(^#?(\d+)$)");
    std::smatch m;
    if (std::regex_match(a.issue, m, url) || std::regex_match(a.issue, m, short_form)) {
      issue_repo = m[1].str() + "/" + m[2].str();
      issue_number = m[3];
      ++sources;
    } else if (std::regex_match(a.issue, m, number)) {
      issue_number = m[1];
      if (sources == 0) throw Failure("usage: --issue NUMBER needs --snapshot or --repo");
    } else {
      throw Failure("usage: --issue expects a URL, OWNER/NAME#N or a number");
    }
  }
  if (sources != 1) {
    throw Failure("usage: give exactly one input: --repo OWNER/NAME, --snapshot PATH or --issue URL");
  }

  Handles h;
  check(ethoscan_config_create(&h.config));
  auto set = [&](const char* key, const std::string& value) {
    if (!value.empty()) check(ethoscan_config_set(h.config, key, value.c_str()));
  };
  for (const auto& t : a.types) set("type", t);
  set("date", a.date);
  if (issue_number) set("issue", *issue_number);
  set("s1-threshold", a.s1Threshold);
  set("s9-stale-days", a.s9StaleDays);
  set("excluded-segments", a.excludedSegments);
  set("so-link-pattern", a.soLinkPattern);
  if (a.strictSoLinks) set("strict-so-links", "true");
  if (a.s2Fuzzy) set("s2-exact", "false");
  set("gram-length", a.gramLength);
  set("winnow-window", a.winnowWindow);
  set("extensions", a.extensions);
  set("licenses", a.licenses);
  set("rules-dir", a.rulesDir);
  for (const auto& r : a.extraRules) set("extra-rules", r);
  if (a.timings) set("timings", "true");
  if (a.format != "json" && a.format != "text") throw Failure("usage: --format is json or text");

  if (!a.snapshot.empty()) {
    h.primary = load(a.snapshot);
  } else if (!a.repo.empty()) {
    h.primary = fetch(a.repo, "both", a.live);
  } else {
    h.primary = fetch(issue_repo, "issueLevel", a.live);
  }
  if (!a.saveSnapshot.empty()) check(ethoscan_snapshot_save(h.primary, a.saveSnapshot.c_str()));

  if (!a.pair.empty()) {
    std::string owner, name;
    if (std::filesystem::exists(a.pair)) {
      h.pair = load(a.pair);
    } else if (split_repo(a.pair, owner, name)) {
      h.pair = fetch(a.pair, "repoLevel", a.live);
    } else {
      throw Failure("usage: --pair is neither a snapshot file nor OWNER/NAME: " + a.pair);
    }
  }

  check(ethoscan_check(h.config, h.primary, h.pair, &h.report));
  char* rendered = nullptr;
  check(ethoscan_report_render(h.report, a.format.c_str(), &rendered));
  std::string text = rendered;
  ethoscan_string_free(rendered);
  write_output(text, a.output);
  return ethoscan_report_exit_status(h.report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-based detection of unethical behavior in hosted repositories"};
  app.set_version_flag("--version", std::string(ethoscan_version()));
  app.require_subcommand(1);

  CheckArgs ca;
  auto* check_cmd = app.add_subcommand("check", "run detectors and print a report");
  check_cmd->add_option("--repo", ca.repo, "fetch OWNER/NAME live");
  check_cmd->add_option("--snapshot", ca.snapshot, "offline snapshot file");
  check_cmd->add_option("--issue", ca.issue,
                        "issue URL or OWNER/NAME#N (live), or a number within the input");
  check_cmd->add_option("--type", ca.types, "s1, s2, s5, s6, s8, s9 or all (repeatable)")->required();
  check_cmd->add_option("--format", ca.format, "json or text")->capture_default_str();
  check_cmd->add_option("--date", ca.date, "evaluation date YYYY-MM-DD (default: today, UTC)");
  check_cmd->add_option("--pair", ca.pair, "second repository for s2: snapshot file or OWNER/NAME");
  check_cmd->add_option("--output,-o", ca.output, "write the report here instead of stdout");
  check_cmd->add_option("--save-snapshot", ca.saveSnapshot, "store the primary input as a snapshot");
  check_cmd->add_option("--s1-threshold", ca.s1Threshold, "minimum containment for s1 (default 0.10)");
  check_cmd->add_option("--s9-stale-days", ca.s9StaleDays, "release age that counts as stale (default 183)");
  check_cmd->add_option("--excluded-segments", ca.excludedSegments,
                        "comma separated URL segments ignored by s8");
  check_cmd->add_option("--so-link-pattern", ca.soLinkPattern, "regex for Stack Overflow links");
  check_cmd->add_flag("--strict-so-links", ca.strictSoLinks, "only match long /questions/ links");
  check_cmd->add_flag("--s2-token-equal", ca.s2Fuzzy,
                      "s2 compares token streams instead of bytes (ignores comments and layout)");
  check_cmd->add_option("--gram-length", ca.gramLength, "tokens per fingerprint gram (default 5)");
  check_cmd->add_option("--winnow-window", ca.winnowWindow, "winnowing window, 0 disables");
  check_cmd->add_option("--extensions", ca.extensions, "comma separated source file extensions");
  check_cmd->add_option("--licenses", ca.licenses, "license catalog JSON");
  check_cmd->add_option("--rules-dir", ca.rulesDir, "directory with s1.rules ... s9.rules");
  check_cmd->add_option("--extra-rules", ca.extraRules, "rule file appended to every pack");
  check_cmd->add_flag("--timings", ca.timings, "include per-detector timings");
  add_live_options(check_cmd, ca.live);

  std::string fetch_repo, fetch_out, fetch_scope = "both";
  LiveOptions fetch_live;
  auto* fetch_cmd = app.add_subcommand("fetch", "capture a snapshot from the live API");
  fetch_cmd->add_option("repo", fetch_repo, "OWNER/NAME")->required();
  fetch_cmd->add_option("--out,-o", fetch_out, "snapshot file to write")->required();
  fetch_cmd->add_option("--scope", fetch_scope, "repoLevel, issueLevel or both")->capture_default_str();
  add_live_options(fetch_cmd, fetch_live);

  std::string fixture_dir = "fixtures", fixture_licenses, fixture_rules;
  auto* fix_cmd = app.add_subcommand("fixtures", "run the offline fixture suite");
  fix_cmd->add_option("dir", fixture_dir, "fixture root")->capture_default_str();
  fix_cmd->add_option("--licenses", fixture_licenses, "license catalog JSON");
  fix_cmd->add_option("--rules-dir", fixture_rules, "directory with the rule packs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*check_cmd) return run_check(ca);
    if (*fetch_cmd) {
      Handles h;
      h.primary = fetch(fetch_repo, fetch_scope.c_str(), fetch_live);
      check(ethoscan_snapshot_save(h.primary, fetch_out.c_str()));
      std::cerr << "wrote " << fetch_out << "\n";
      return 0;
    }
    if (*fix_cmd) {
      Handles h;
      check(ethoscan_config_create(&h.config));
      if (!fixture_licenses.empty()) check(ethoscan_config_set(h.config, "licenses", fixture_licenses.c_str()));
      if (!fixture_rules.empty()) check(ethoscan_config_set(h.config, "rules-dir", fixture_rules.c_str()));
      char* matrix = nullptr;
      int passed = 0;
      check(ethoscan_fixture_suite_run(fixture_dir.c_str(), h.config, &matrix, &passed));
      std::cout << matrix;
      ethoscan_string_free(matrix);
      return passed ? 0 : 1;
    }
  } catch (const Failure& e) {
    std::cerr << "ethoscan: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
