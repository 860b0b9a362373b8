// Exercises the shared library through its C interface only.
#include <gtest/gtest.h>

#include <string>

#include "ethoscan/ethoscan.h"

namespace {

const std::string kFixtures = std::string(ETHOSCAN_SOURCE_DIR) + "/fixtures/";

struct Loaded {
  ethoscan_snapshot* snap = nullptr;
  explicit Loaded(const std::string& path) {
    EXPECT_EQ(ethoscan_snapshot_load(path.c_str(), &snap), ETHOSCAN_OK) << ethoscan_last_error();
  }
  ~Loaded() { ethoscan_snapshot_free(snap); }
};

struct Config {
  ethoscan_config* cfg = nullptr;
  Config() { EXPECT_EQ(ethoscan_config_create(&cfg), ETHOSCAN_OK); }
  ~Config() { ethoscan_config_free(cfg); }
  ethoscan_status set(const char* k, const char* v) { return ethoscan_config_set(cfg, k, v); }
};

std::string render(ethoscan_report* r, const char* format) {
  char* out = nullptr;
  EXPECT_EQ(ethoscan_report_render(r, format, &out), ETHOSCAN_OK);
  std::string s = out ? out : "";
  ethoscan_string_free(out);
  return s;
}

}  // namespace

TEST(CApi, Basics) {
  EXPECT_STRNE(ethoscan_version(), "");
  EXPECT_STREQ(ethoscan_status_name(ETHOSCAN_E_BUDGET_EXHAUSTED), "budget-exhausted");
  EXPECT_STREQ(ethoscan_status_name(ETHOSCAN_OK), "ok");
}

TEST(CApi, LoadErrors) {
  ethoscan_snapshot* s = nullptr;
  EXPECT_EQ(ethoscan_snapshot_load((kFixtures + "nope/snapshot.json").c_str(), &s), ETHOSCAN_E_IO);
  EXPECT_EQ(s, nullptr);
  EXPECT_STRNE(ethoscan_last_error(), "");
  EXPECT_EQ(ethoscan_snapshot_load(nullptr, &s), ETHOSCAN_E_USAGE);
  EXPECT_EQ(ethoscan_snapshot_load((kFixtures + "README.md").c_str(), &s), ETHOSCAN_E_FORMAT);
}

TEST(CApi, ConfigValidation) {
  Config c;
  EXPECT_EQ(c.set("type", "s5"), ETHOSCAN_OK);
  EXPECT_EQ(c.set("date", "2022-01-01"), ETHOSCAN_OK);
  EXPECT_EQ(c.set("no-such-key", "1"), ETHOSCAN_E_USAGE);
  EXPECT_EQ(c.set("s1-threshold", "1.5"), ETHOSCAN_E_USAGE);
  EXPECT_EQ(c.set("s1-threshold", "abc"), ETHOSCAN_E_USAGE);
  EXPECT_EQ(c.set("date", "2022-13-01"), ETHOSCAN_E_USAGE);
  EXPECT_EQ(c.set("s2-exact", "maybe"), ETHOSCAN_E_USAGE);
  EXPECT_EQ(ethoscan_config_set(nullptr, "type", "s5"), ETHOSCAN_E_USAGE);
}

TEST(CApi, CheckAndRender) {
  Loaded snap(kFixtures + "s5_missing/snapshot.json");
  EXPECT_STREQ(ethoscan_snapshot_repo(snap.snap), "student/tool");
  Config c;
  c.set("type", "s5");
  c.set("date", "2022-01-01");
  ethoscan_report* r = nullptr;
  ASSERT_EQ(ethoscan_check(c.cfg, snap.snap, nullptr, &r), ETHOSCAN_OK) << ethoscan_last_error();
  EXPECT_EQ(ethoscan_report_violation_count(r), 1u);
  EXPECT_EQ(ethoscan_report_diagnostic_count(r), 0u);
  EXPECT_EQ(ethoscan_report_exit_status(r), 1);
  EXPECT_NE(render(r, "json").find("\"S5\""), std::string::npos);
  EXPECT_NE(render(r, "text").find("POTENTIAL VIOLATION S5"), std::string::npos);
  char* out = nullptr;
  EXPECT_EQ(ethoscan_report_render(r, "xml", &out), ETHOSCAN_E_USAGE);
  ethoscan_report_free(r);
}

TEST(CApi, PairIsRequiredForS2) {
  Loaded a(kFixtures + "s2_all_conditions/a.json");
  Loaded b(kFixtures + "s2_all_conditions/b.json");
  Config c;
  c.set("type", "s2");
  ethoscan_report* r = nullptr;
  EXPECT_EQ(ethoscan_check(c.cfg, a.snap, nullptr, &r), ETHOSCAN_E_USAGE);
  ASSERT_EQ(ethoscan_check(c.cfg, a.snap, b.snap, &r), ETHOSCAN_OK);
  EXPECT_EQ(ethoscan_report_violation_count(r), 1u);
  ethoscan_report_free(r);
}

TEST(CApi, SaveAndReload) {
  Loaded a(kFixtures + "s6_all_conditions/snapshot.json");
  std::string path = testing::TempDir() + "capi_roundtrip.json";
  ASSERT_EQ(ethoscan_snapshot_save(a.snap, path.c_str()), ETHOSCAN_OK);
  Loaded b(path);
  EXPECT_STREQ(ethoscan_snapshot_repo(a.snap), ethoscan_snapshot_repo(b.snap));
}

TEST(CApi, FixtureSuite) {
  char* matrix = nullptr;
  int passed = 0;
  ASSERT_EQ(ethoscan_fixture_suite_run(kFixtures.c_str(), nullptr, &matrix, &passed), ETHOSCAN_OK)
      << ethoscan_last_error();
  EXPECT_EQ(passed, 1);
  EXPECT_NE(std::string(matrix).find("s1_all_conditions"), std::string::npos);
  ethoscan_string_free(matrix);
  EXPECT_EQ(ethoscan_http_clients_constructed(), 0);
}

TEST(CApi, FreeNullIsHarmless) {
  ethoscan_snapshot_free(nullptr);
  ethoscan_config_free(nullptr);
  ethoscan_report_free(nullptr);
  ethoscan_string_free(nullptr);
}
