#include <gtest/gtest.h>

#include <fstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/license.hpp"
#include "ethoscan/text.hpp"
#include "support/builders.hpp"

using namespace ethoscan;
using namespace ethoscan::license;
using testsupport::catalog;
using testsupport::file;

namespace {

std::string header_of(const std::string& spdx) { return catalog().find(spdx)->header; }

std::string diff(const std::string& removed, const std::string& added) {
  std::string out = "--- a/LICENSE\n+++ b/LICENSE\n@@ -1 +1 @@\n";
  for (auto& l : text::split(removed, '\n')) {
    if (!l.empty()) out += "-" + l + "\n";
  }
  for (auto& l : text::split(added, '\n')) {
    if (!l.empty()) out += "+" + l + "\n";
  }
  return out;
}

CommitInfo commit(const std::string& sha, const std::string& ts, std::optional<std::string> change,
                  std::int64_t prs = 0) {
  return CommitInfo{sha, parse_timestamp(ts), std::move(change), prs};
}

}  // namespace

TEST(Catalog, EveryHeaderIdentifiesItself) {
  ASSERT_GE(catalog().entries().size(), 20u);
  for (const auto& e : catalog().entries()) {
    const LicenseEntry* m = catalog().match_text(e.header);
    ASSERT_NE(m, nullptr) << e.spdx;
    EXPECT_EQ(m->spdx, e.spdx);
    auto n = catalog().match_name("Released under " + e.spdx + ".");
    ASSERT_TRUE(n.has_value()) << e.spdx;
    EXPECT_EQ(n->entry->spdx, e.spdx);
    EXPECT_FALSE(e.aliases.empty()) << e.spdx;
  }
}

TEST(Catalog, CoversCommonLicenses) {
  for (const char* id : {"MIT", "Apache-2.0", "GPL-2.0", "GPL-3.0", "LGPL-3.0", "AGPL-3.0",
                         "BSD-2-Clause", "BSD-3-Clause", "MPL-2.0", "Unlicense", "ISC", "CC0-1.0"}) {
    EXPECT_NE(catalog().find(id), nullptr) << id;
  }
}

TEST(Catalog, NameMatching) {
  EXPECT_EQ(catalog().match_name("Licensed under Apache-2.0")->entry->spdx, "Apache-2.0");
  EXPECT_EQ(catalog().match_name("the mit license applies")->entry->spdx, "MIT");
  EXPECT_FALSE(catalog().match_name("submit a pull request").has_value());
  EXPECT_FALSE(catalog().match_name("License: to be decided").has_value());
  auto first = catalog().match_name("GPL-3.0 or, at your option, MIT");
  EXPECT_EQ(first->entry->spdx, "GPL-3.0");
}

TEST(Catalog, RejectsMalformedJson) {
  try {
    LicenseCatalog::from_json(nlohmann::json{{"licenses", {{{"spdx", "X"}}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

TEST(DetectRepoLicense, RootLicenseFile) {
  auto r = testsupport::repo("o/r", {file("LICENSE", header_of("MIT"))});
  r.licenseFile = r.files[0];
  auto info = detect_repo_license(r, catalog());
  ASSERT_TRUE(info);
  EXPECT_EQ(info->spdxId, "MIT");
  EXPECT_EQ(info->source, LicenseSource::kLicenseFile);
}

TEST(DetectRepoLicense, ReadmeDeclaration) {
  auto r = testsupport::repo("o/r", {file("README.md", "# x\nLicensed under Apache-2.0\n")});
  r.readmeFile = r.files[0];
  auto info = detect_repo_license(r, catalog());
  ASSERT_TRUE(info);
  EXPECT_EQ(info->spdxId, "Apache-2.0");
  EXPECT_EQ(info->source, LicenseSource::kReadme);
}

TEST(DetectRepoLicense, InnerFolderIsIgnored) {
  auto r = testsupport::repo("o/r", {file("docs/LICENSE", header_of("MIT"))});
  EXPECT_FALSE(detect_repo_license(r, catalog()).has_value());
}

TEST(DetectRepoLicense, UnknownLicenseTextStillCounts) {
  auto r = testsupport::repo("o/r", {file("COPYING", "All rights reserved by the author.\n")});
  auto info = detect_repo_license(r, catalog());
  ASSERT_TRUE(info);
  EXPECT_EQ(info->spdxId, "unknown");
}

TEST(LicenseChanges, FirstCommitIgnored) {
  auto r = testsupport::repo("o/r");
  r.licenseCommits = {commit("a1b2c3d", "2021-01-01T00:00:00Z", diff("", header_of("MIT")))};
  EXPECT_TRUE(extract_license_changes(r, catalog()).empty());
}

TEST(LicenseChanges, SwitchAndRestore) {
  auto r = testsupport::repo("o/r");
  std::string apache = header_of("Apache-2.0"), gpl = header_of("GPL-3.0");
  r.licenseCommits = {commit("a1b2c3d", "2021-01-01T00:00:00Z", diff("", apache)),
                      commit("b2c3d4e", "2021-02-01T00:00:00Z", diff(apache, gpl))};
  auto events = extract_license_changes(r, catalog());
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].fromLicense, "Apache-2.0");
  EXPECT_EQ(events[0].toLicense, "GPL-3.0");

  r.licenseCommits.push_back(commit("c3d4e5f", "2021-02-02T00:00:00Z", diff(gpl, apache)));
  events = extract_license_changes(r, catalog());
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].fromLicense, "GPL-3.0");
  EXPECT_EQ(events[1].toLicense, "Apache-2.0");
}

TEST(LicenseChanges, CosmeticEditIsNotAChange) {
  auto r = testsupport::repo("o/r");
  std::string mit = header_of("MIT");
  r.licenseCommits = {commit("a1b2c3d", "2021-01-01T00:00:00Z", diff("", mit)),
                      commit("b2c3d4e", "2021-02-01T00:00:00Z", diff(mit, mit + "\n(c) 2021"))};
  EXPECT_TRUE(extract_license_changes(r, catalog()).empty());
}

TEST(LicenseChanges, MissingDiff) {
  auto r = testsupport::repo("o/r");
  r.licenseCommits = {commit("a1b2c3d", "2021-01-01T00:00:00Z", std::nullopt)};
  try {
    extract_license_changes(r, catalog());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingDiff);
  }
}

TEST(SplitDiff, SkipsHeaders) {
  auto s = split_diff("--- a/L\n+++ b/L\n@@ -1 +1 @@\n-old\n+new\n context\n");
  EXPECT_EQ(s.removed, "old\n");
  EXPECT_EQ(s.added, "new\n");
}

TEST(FileNames, Recognized) {
  EXPECT_TRUE(is_license_file_name("LICENSE.md"));
  EXPECT_TRUE(is_license_file_name("copying"));
  EXPECT_FALSE(is_license_file_name("LICENSE.rtf"));
  EXPECT_TRUE(is_readme_file_name("readme.rst"));
  EXPECT_TRUE(is_changelog_file_name("CHANGELOG.md"));
}
