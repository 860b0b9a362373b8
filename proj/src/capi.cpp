#include "ethoscan/ethoscan.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ethoscan/detectors.hpp"
#include "ethoscan/errors.hpp"
#include "ethoscan/fixtures.hpp"
#include "ethoscan/ingest.hpp"
#include "ethoscan/links.hpp"
#include "ethoscan/report.hpp"
#include "ethoscan/text.hpp"

struct ethoscan_snapshot {
  ethoscan::Snapshot snapshot;
  std::string repo;
};

struct ethoscan_config {
  std::vector<std::string> types;
  std::optional<ethoscan::Date> date;
  std::optional<std::int64_t> issue;
  ethoscan::detect::DetectorConfig detector;
  std::optional<std::filesystem::path> licenses;
  std::optional<std::filesystem::path> rulesDir;
  std::vector<std::filesystem::path> extraRules;
  bool timings = false;
};

struct ethoscan_report {
  ethoscan::report::RunReport report;
};

namespace {

using ethoscan::Error;
using ethoscan::ErrorCode;

thread_local std::string g_last_error;

template <typename F>
ethoscan_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return ETHOSCAN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<ethoscan_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ETHOSCAN_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ETHOSCAN_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kUsage, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string l = ethoscan::text::to_lower_ascii(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw Error(ErrorCode::kUsage, key + ": expected true or false, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long long n = std::stoll(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kUsage, key + ": expected an integer, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& part : ethoscan::text::split(v, ',')) {
    std::string t = ethoscan::text::collapse_whitespace(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

ethoscan::license::LicenseCatalog catalog_for(const ethoscan_config* c) {
  return c && c->licenses ? ethoscan::license::LicenseCatalog::load(*c->licenses)
                          : ethoscan::license::LicenseCatalog::load_default();
}

ethoscan::detect::RulePacks packs_for(const ethoscan_config* c) {
  std::vector<std::filesystem::path> extra = c ? c->extraRules : std::vector<std::filesystem::path>{};
  return c && c->rulesDir ? ethoscan::detect::RulePacks::load(*c->rulesDir, extra)
                          : ethoscan::detect::RulePacks::load_default(extra);
}

}  // namespace

extern "C" {

const char* ethoscan_version(void) { return ETHOSCAN_VERSION; }

const char* ethoscan_last_error(void) { return g_last_error.c_str(); }

const char* ethoscan_status_name(ethoscan_status status) {
  if (status == ETHOSCAN_OK) return "ok";
  if (status < ETHOSCAN_E_USAGE || status > ETHOSCAN_E_INTERNAL) return "unknown";
  return ethoscan::to_string(static_cast<ErrorCode>(status)).data();
}

ethoscan_status ethoscan_snapshot_load(const char* path, ethoscan_snapshot** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto h = std::make_unique<ethoscan_snapshot>();
    h->snapshot = ethoscan::load_snapshot(path);
    h->repo = h->snapshot.repo.id().full();
    *out = h.release();
  });
}

ethoscan_status ethoscan_snapshot_save(const ethoscan_snapshot* snapshot, const char* path) {
  return guarded([&] {
    require(snapshot, "snapshot");
    require(path, "path");
    ethoscan::save_snapshot(snapshot->snapshot, path);
  });
}

ethoscan_status ethoscan_snapshot_fetch(const char* owner, const char* name, const char* scope,
                                        long long max_requests, long long min_interval_ms,
                                        const char* api_base, ethoscan_snapshot** out) {
  return guarded([&] {
    require(owner, "owner");
    require(name, "name");
    require(scope, "scope");
    require(out, "out");
    auto s = ethoscan::parse_scope(scope);
    if (!s) throw Error(ErrorCode::kUsage, std::string("unknown scope '") + scope + "'");
    ethoscan::ingest::FetchOptions opts;
    if (api_base && *api_base) opts.apiBase = api_base;
    auto h = std::make_unique<ethoscan_snapshot>();
    h->snapshot = ethoscan::ingest::fetch_repository(owner, name, {max_requests, min_interval_ms},
                                                     *s, opts);
    h->repo = h->snapshot.repo.id().full();
    *out = h.release();
  });
}

void ethoscan_snapshot_free(ethoscan_snapshot* snapshot) { delete snapshot; }

const char* ethoscan_snapshot_repo(const ethoscan_snapshot* snapshot) {
  return snapshot ? snapshot->repo.c_str() : "";
}

long long ethoscan_http_clients_constructed(void) {
  return ethoscan::ingest::HttpTransport::constructed();
}

ethoscan_status ethoscan_config_create(ethoscan_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ethoscan_config();
  });
}

ethoscan_status ethoscan_config_set(ethoscan_config* c, const char* key_c, const char* value_c) {
  return guarded([&] {
    require(c, "config");
    require(key_c, "key");
    require(value_c, "value");
    const std::string key = key_c;
    const std::string v = value_c;
    auto& d = c->detector;
    if (key == "type") {
      for (auto& t : parse_list(v)) c->types.push_back(t);
    } else if (key == "date") {
      try {
        c->date = ethoscan::parse_date(v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kUsage, e.what());
      }
    } else if (key == "issue") {
      c->issue = parse_int(key, v);
      if (*c->issue <= 0) throw Error(ErrorCode::kUsage, "issue number must be positive");
    } else if (key == "s1-threshold") {
      try {
        size_t used = 0;
        d.s1Threshold = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kUsage, "s1-threshold: expected a number, got '" + v + "'");
      }
    } else if (key == "s2-exact") {
      d.s2RequireExact = parse_bool(key, v);
    } else if (key == "s9-stale-days") {
      d.s9StaleDays = parse_int(key, v);
    } else if (key == "excluded-segments") {
      d.s8ExcludedPathSegments = parse_list(v);
    } else if (key == "so-link-pattern") {
      d.soLinkPattern = v;
    } else if (key == "strict-so-links") {
      if (parse_bool(key, v)) d.soLinkPattern = ethoscan::links::strict_so_link_pattern();
    } else if (key == "gram-length") {
      long long k = parse_int(key, v);
      if (k <= 0) throw Error(ErrorCode::kUsage, "gram-length must be positive");
      d.gramLength = static_cast<size_t>(k);
    } else if (key == "winnow-window") {
      long long w = parse_int(key, v);
      if (w < 0) throw Error(ErrorCode::kUsage, "winnow-window must not be negative");
      d.winnowWindow = static_cast<size_t>(w);
    } else if (key == "extensions") {
      d.sourceExtensions.clear();
      for (auto& e : parse_list(v)) {
        if (!e.empty() && e[0] == '.') e.erase(0, 1);
        d.sourceExtensions.insert(ethoscan::text::to_lower_ascii(e));
      }
    } else if (key == "licenses") {
      c->licenses = v;
    } else if (key == "rules-dir") {
      c->rulesDir = v;
    } else if (key == "extra-rules") {
      c->extraRules.emplace_back(v);
    } else if (key == "timings") {
      c->timings = parse_bool(key, v);
    } else {
      throw Error(ErrorCode::kUsage, "unknown configuration key '" + key + "'");
    }
    d.validate();
  });
}

void ethoscan_config_free(ethoscan_config* config) { delete config; }

ethoscan_status ethoscan_check(const ethoscan_config* c, const ethoscan_snapshot* primary,
                               const ethoscan_snapshot* pair, ethoscan_report** out) {
  return guarded([&] {
    require(c, "config");
    require(primary, "primary snapshot");
    require(out, "out");
    auto catalog = catalog_for(c);
    auto packs = packs_for(c);
    ethoscan::detect::DetectorContext ctx{packs, catalog, c->detector,
                                          c->date.value_or(ethoscan::today_utc())};
    ethoscan::report::CheckInput in;
    in.primary = &primary->snapshot;
    in.pair = pair ? &pair->snapshot : nullptr;
    in.issue = c->issue;
    in.requestedTypes = c->types;
    auto h = std::make_unique<ethoscan_report>();
    h->report = ethoscan::report::run_check(in, ctx, c->timings);
    *out = h.release();
  });
}

ethoscan_status ethoscan_report_render(const ethoscan_report* r, const char* format, char** out) {
  return guarded([&] {
    require(r, "report");
    require(format, "format");
    require(out, "out");
    std::string f = format;
    if (f == "json") {
      *out = dup_string(ethoscan::report::render_json(r->report));
    } else if (f == "text") {
      *out = dup_string(ethoscan::report::render_text(r->report));
    } else {
      throw Error(ErrorCode::kUsage, "unknown format '" + f + "' (expected json or text)");
    }
  });
}

int ethoscan_report_exit_status(const ethoscan_report* r) {
  return r ? ethoscan::report::exit_status(r->report) : 2;
}

size_t ethoscan_report_violation_count(const ethoscan_report* r) {
  return r ? r->report.violations.size() : 0;
}

size_t ethoscan_report_diagnostic_count(const ethoscan_report* r) {
  return r ? r->report.diagnostics.size() : 0;
}

void ethoscan_report_free(ethoscan_report* r) { delete r; }

void ethoscan_string_free(char* s) { std::free(s); }

ethoscan_status ethoscan_fixture_suite_run(const char* dir, const ethoscan_config* c,
                                           char** matrix_json, int* all_passed) {
  return guarded([&] {
    require(dir, "dir");
    require(matrix_json, "matrix_json");
    require(all_passed, "all_passed");
    auto catalog = catalog_for(c);
    auto packs = packs_for(c);
    auto result = ethoscan::fixtures::run_fixture_suite(
        dir, packs, catalog, c ? c->detector : ethoscan::detect::DetectorConfig{});
    *matrix_json = dup_string(result.to_json().dump(2) + "\n");
    *all_passed = result.all_passed() ? 1 : 0;
  });
}

}  // extern "C"
