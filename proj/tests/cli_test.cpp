// Runs the ethoscan binary and checks exit codes and output.
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

const std::string kFixtures = std::string(ETHOSCAN_SOURCE_DIR) + "/fixtures/";

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string("ETHOSCAN_TOKEN= ") + ETHOSCAN_CLI + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int w = pclose(p);
  r.status = WIFEXITED(w) ? WEXITSTATUS(w) : -1;
  return r;
}

std::string snap(const std::string& c, const std::string& f = "snapshot.json") {
  return kFixtures + c + "/" + f;
}

}  // namespace

TEST(Cli, MissingLicenseReportsOneViolation) {
  auto r = run("check --snapshot " + snap("s5_missing") + " --type s5 --format json --date 2022-01-01");
  EXPECT_EQ(r.status, 1);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["violations"].size(), 1u);
  EXPECT_EQ(j["violations"][0]["behaviorType"], "S5");
}

TEST(Cli, CleanRepositoryExitsZero) {
  auto r = run("check --snapshot " + snap("clean") + " --type all --date 2022-01-01");
  EXPECT_EQ(r.status, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("check --snapshot " + snap("s2_all_conditions", "a.json") + " --type s2").status, 2);
  EXPECT_EQ(run("check --snapshot " + snap("s5_missing") + " --type s1").status, 2);
  EXPECT_EQ(run("check --snapshot " + snap("clean") + " --type s4").status, 2);
  EXPECT_EQ(run("check --snapshot " + snap("clean")).status, 2);
  EXPECT_EQ(run("check --snapshot " + snap("clean") + " --type all --date yesterday").status, 2);
  EXPECT_EQ(run("check --snapshot /nonexistent.json --type all").status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(Cli, PairedCheck) {
  auto r = run("check --snapshot " + snap("s2_all_conditions", "a.json") + " --pair " +
               snap("s2_all_conditions", "b.json") + " --type s2 --format text");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("POTENTIAL VIOLATION S2"), std::string::npos);
}

TEST(Cli, CannotEvaluateExitsThree) {
  auto r = run("check --snapshot " + snap("s9_page_unavailable") + " --type s9 --date 2022-01-01");
  EXPECT_EQ(r.status, 3);
}

TEST(Cli, OutputFileAndDeterminism) {
  std::string a = testing::TempDir() + "cli_a.json", b = testing::TempDir() + "cli_b.json";
  std::string base = "check --snapshot " + snap("s1_all_conditions") +
                     " --type all --format json --date 2022-01-01 -o ";
  EXPECT_EQ(run(base + a).status, 1);
  EXPECT_EQ(run(base + b).status, 1);
  std::ifstream fa(a), fb(b);
  std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
}

TEST(Cli, FixtureSuite) {
  auto r = run("fixtures " + kFixtures);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("s8_excluded_segments"), std::string::npos);
}

TEST(Cli, UnreachableApiIsAnError) {
  auto r = run("check --repo octo/none --type s5 --api-base http://127.0.0.1:1 --max-requests 3");
  EXPECT_EQ(r.status, 2);
}
