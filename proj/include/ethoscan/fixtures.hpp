#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ethoscan/detectors.hpp"

namespace ethoscan::fixtures {

/// One directory under the fixture root, described by its `case.json`.
struct FixtureCase {
  std::string name;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> snapshotPaths;  // primary first, then the S2 pair
  std::optional<std::int64_t> issue;
  std::map<BehaviorType, std::int64_t> expected;
  std::optional<std::string> fpClass;
  std::vector<std::string> falsifies;  // detector conditions a negative case breaks
  nlohmann::json options;  // detector overrides and "date"
};

/// Throws Error(kIo) for a missing case.json or snapshot file and
/// Error(kFormat) for a malformed case.
FixtureCase load_case(const std::filesystem::path& dir);
/// Every case directory under `root`, sorted by name.
std::vector<FixtureCase> discover(const std::filesystem::path& root);

/// Applies a case's option overrides.
void apply_options(const nlohmann::json& options, detect::DetectorConfig& cfg, Date& date);

struct CellResult {
  std::string caseName;
  BehaviorType behaviorType = BehaviorType::kS1;
  std::int64_t expected = 0;
  std::int64_t actual = 0;
  std::optional<std::string> fpClass;
  std::optional<std::string> error;

  bool passed() const { return !error && expected == actual; }
};

struct SuiteResult {
  std::vector<CellResult> cells;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Runs every case fully offline and compares violation counts per detector.
SuiteResult run_fixture_suite(const std::filesystem::path& root, const detect::RulePacks& rules,
                              const license::LicenseCatalog& catalog,
                              const detect::DetectorConfig& base = {});

}  // namespace ethoscan::fixtures
