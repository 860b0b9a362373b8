#include "ethoscan/fixtures.hpp"

#include <algorithm>
#include <fstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/links.hpp"
#include "ethoscan/report.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::fixtures {
namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::kIo, "missing fixture file " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, p.string() + ": " + e.what());
  }
}

}  // namespace

FixtureCase load_case(const std::filesystem::path& dir) {
  json j = read_json(dir / "case.json");
  FixtureCase c;
  c.dir = dir;
  try {
    c.name = j.at("name").get<std::string>();
    if (!j.at("snapshots").is_array()) throw Error(ErrorCode::kFormat, dir.string() + ": snapshots must be a list");
    for (const auto& s : j.at("snapshots")) {
      auto p = dir / s.get<std::string>();
      if (!std::filesystem::exists(p)) throw Error(ErrorCode::kIo, "missing fixture file " + p.string());
      c.snapshotPaths.push_back(p);
    }
    if (j.contains("issue")) c.issue = j["issue"].get<std::int64_t>();
    for (const auto& [k, v] : j.at("expected").items()) {
      auto t = parse_behavior(k);
      if (!t) throw Error(ErrorCode::kFormat, dir.string() + ": unknown detector '" + k + "'");
      c.expected[*t] = v.get<std::int64_t>();
    }
    if (j.contains("fpClass") && !j["fpClass"].is_null()) c.fpClass = j["fpClass"].get<std::string>();
    if (j.contains("falsifies")) c.falsifies = j["falsifies"].get<std::vector<std::string>>();
    c.options = j.value("options", json::object());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, (dir / "case.json").string() + ": " + e.what());
  }
  if (c.snapshotPaths.empty()) throw Error(ErrorCode::kFormat, dir.string() + ": no snapshots listed");
  return c;
}

std::vector<FixtureCase> discover(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw Error(ErrorCode::kIo, "fixture directory not found: " + root.string());
  }
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (e.is_directory() && std::filesystem::exists(e.path() / "case.json")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<FixtureCase> out;
  for (const auto& d : dirs) out.push_back(load_case(d));
  return out;
}

void apply_options(const json& o, detect::DetectorConfig& cfg, Date& date) {
  for (const auto& [key, v] : o.items()) {
    if (key == "date") {
      date = parse_date(v.get<std::string>());
    } else if (key == "s1Threshold") {
      cfg.s1Threshold = v.get<double>();
    } else if (key == "s2RequireExact") {
      cfg.s2RequireExact = v.get<bool>();
    } else if (key == "s9StaleDays") {
      cfg.s9StaleDays = v.get<std::int64_t>();
    } else if (key == "s8ExcludedPathSegments") {
      cfg.s8ExcludedPathSegments = v.get<std::vector<std::string>>();
    } else if (key == "strictSoLinks") {
      if (v.get<bool>()) cfg.soLinkPattern = links::strict_so_link_pattern();
    } else if (key == "soLinkPattern") {
      cfg.soLinkPattern = v.get<std::string>();
    } else if (key == "gramLength") {
      cfg.gramLength = v.get<size_t>();
    } else if (key == "winnowWindow") {
      cfg.winnowWindow = v.get<size_t>();
    } else {
      throw Error(ErrorCode::kFormat, "unknown fixture option '" + key + "'");
    }
  }
}

bool SuiteResult::all_passed() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.passed(); });
}

json SuiteResult::to_json() const {
  json rows = json::array();
  for (const auto& c : cells) {
    json r = {{"case", c.caseName},
              {"detector", std::string(to_string(c.behaviorType))},
              {"expected", c.expected},
              {"actual", c.actual},
              {"passed", c.passed()}};
    if (c.fpClass) r["fpClass"] = *c.fpClass;
    if (c.error) r["error"] = *c.error;
    rows.push_back(std::move(r));
  }
  return {{"cells", rows}, {"allPassed", all_passed()}};
}

SuiteResult run_fixture_suite(const std::filesystem::path& root, const detect::RulePacks& rules,
                              const license::LicenseCatalog& catalog,
                              const detect::DetectorConfig& base) {
  SuiteResult out;
  for (const auto& c : discover(root)) {
    std::vector<Snapshot> snaps;
    for (const auto& p : c.snapshotPaths) snaps.push_back(load_snapshot(p));
    detect::DetectorConfig cfg = base;
    Date date = today_utc();
    apply_options(c.options, cfg, date);
    detect::DetectorContext ctx{rules, catalog, cfg, date};
    for (const auto& [type, expected] : c.expected) {
      CellResult cell{c.name, type, expected, 0, c.fpClass, std::nullopt};
      try {
        report::CheckInput in;
        in.primary = &snaps[0];
        in.pair = snaps.size() > 1 ? &snaps[1] : nullptr;
        in.issue = c.issue;
        in.requestedTypes = {text::to_lower_ascii(to_string(type))};
        auto r = report::run_check(in, ctx);
        cell.actual = static_cast<std::int64_t>(r.violations.size());
      } catch (const Error& e) {
        cell.error = std::string(to_string(e.code())) + ": " + e.what();
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace ethoscan::fixtures
