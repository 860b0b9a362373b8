#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ethoscan/detectors.hpp"
#include "ethoscan/fact_model.hpp"
#include "ethoscan/license.hpp"
#include "ethoscan/snapshot.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return ETHOSCAN_SOURCE_DIR; }
inline std::filesystem::path fixtures_dir() { return source_dir() / "fixtures"; }

inline ethoscan::FileContent file(std::string path, std::string content) {
  auto size = static_cast<std::int64_t>(content.size());
  return ethoscan::FileContent{std::move(path), std::move(content), size};
}

inline ethoscan::RepositoryFacts repo(const std::string& full,
                                      std::vector<ethoscan::FileContent> files = {},
                                      std::vector<std::string> contributors = {}) {
  auto id = ethoscan::RepoId::parse(full);
  ethoscan::RepositoryFacts r;
  r.owner = id.owner;
  r.name = id.name;
  r.files = std::move(files);
  r.fileCount = static_cast<std::int64_t>(r.files.size());
  for (auto& c : contributors) r.contributors.insert(ethoscan::UserRef{c});
  return r;
}

inline ethoscan::IssueFacts issue(const std::string& full, std::int64_t number,
                                  const std::string& owner,
                                  std::vector<std::pair<std::string, std::string>> posts,
                                  ethoscan::IssueKind kind = ethoscan::IssueKind::kIssue) {
  ethoscan::IssueFacts i;
  i.repo = ethoscan::RepoId::parse(full);
  i.number = number;
  i.kind = kind;
  i.owner = ethoscan::UserRef{owner};
  for (auto& [a, t] : posts) i.bodyAndComments.push_back({ethoscan::UserRef{a}, t});
  return i;
}

inline ethoscan::Snapshot snapshot(ethoscan::RepositoryFacts r,
                                   std::vector<ethoscan::IssueFacts> issues = {},
                                   std::vector<ethoscan::RepositoryFacts> related = {}) {
  ethoscan::Snapshot s;
  s.capturedAt = ethoscan::parse_timestamp("2022-01-01T00:00:00Z");
  s.repo = std::move(r);
  s.issues = std::move(issues);
  s.relatedRepos = std::move(related);
  return s;
}

inline ethoscan::Snapshot load_fixture(const std::string& name,
                                       const std::string& file = "snapshot.json") {
  return ethoscan::load_snapshot(fixtures_dir() / name / file);
}

inline const ethoscan::license::LicenseCatalog& catalog() {
  static const auto c =
      ethoscan::license::LicenseCatalog::load(source_dir() / "data" / "licenses.json");
  return c;
}

inline const ethoscan::detect::RulePacks& packs() {
  static const auto p = ethoscan::detect::RulePacks::load(source_dir() / "rules");
  return p;
}

inline ethoscan::detect::DetectorContext context(
    ethoscan::detect::DetectorConfig cfg = {},
    ethoscan::Date date = ethoscan::parse_date("2022-01-01")) {
  return ethoscan::detect::DetectorContext{packs(), catalog(), std::move(cfg), date};
}

}  // namespace testsupport
