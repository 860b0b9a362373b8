// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ethoscan/errors.hpp"
#include "ethoscan/fixtures.hpp"
#include "ethoscan/report.hpp"
#include "ethoscan/rules.hpp"
#include "ethoscan/similarity.hpp"
#include "ethoscan/snapshot.hpp"
#include "oracle/kgram_oracle.hpp"
#include "oracle/naive_datalog.hpp"

using namespace ethoscan;
using Clock = std::chrono::steady_clock;

namespace {

const std::filesystem::path kSource = ETHOSCAN_SOURCE_DIR;
const std::filesystem::path kFixtures = kSource / "fixtures";

const license::LicenseCatalog& catalog() {
  static const auto c = license::LicenseCatalog::load(kSource / "data" / "licenses.json");
  return c;
}

const detect::RulePacks& packs() {
  static const auto p = detect::RulePacks::load(kSource / "rules");
  return p;
}

detect::DetectorContext context(detect::DetectorConfig cfg = {}) {
  return detect::DetectorContext{packs(), catalog(), std::move(cfg), parse_date("2022-01-01")};
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      detail << what;
      ok = false;
    }
  }
};

// --- 1 -----------------------------------------------------------------------

const std::map<BehaviorType, std::vector<std::string>> kConditions = {
    {BehaviorType::kS1,
     {"S1.poster_is_not_answer_owner", "S1.code_is_copied", "S1.link_missing_from_code"}},
    {BehaviorType::kS2, {"S2.identical_contents", "S2.not_official_fork"}},
    {BehaviorType::kS5, {"S5.no_root_license_file", "S5.no_license_in_readme"}},
    {BehaviorType::kS6, {"S6.license_changed", "S6.not_in_changelog", "S6.not_via_pull_request"}},
    {BehaviorType::kS8,
     {"S8.links_other_repository", "S8.opener_outside_project", "S8.opener_contributes_to_link"}},
    {BehaviorType::kS9,
     {"S9.release_is_stale", "S9.original_repository", "S9.store_listing", "S9.paid_features"}},
};

Outcome condition_completeness() {
  Outcome o;
  auto start = Clock::now();
  auto suite = fixtures::run_fixture_suite(kFixtures, packs(), catalog());
  double elapsed = seconds_since(start);
  auto cases = fixtures::discover(kFixtures);

  std::map<std::string, bool> passed;
  for (const auto& c : suite.cells) {
    if (!c.passed()) {
      o.require(false, c.caseName + " " + std::string(to_string(c.behaviorType)) + " expected " +
                           std::to_string(c.expected) + " got " + std::to_string(c.actual));
    }
    auto [it, fresh] = passed.emplace(c.caseName, c.passed());
    if (!fresh) it->second = it->second && c.passed();
  }

  size_t required = 0;
  for (const auto& [type, conds] : kConditions) {
    required += 1 + conds.size();
    std::string positive = type == BehaviorType::kS5
                               ? "s5_missing"
                               : "s" + std::string(to_string(type)).substr(1) + "_all_conditions";
    bool found = false;
    for (const auto& c : cases) {
      if (c.name == positive && c.expected.count(type) && c.expected.at(type) == 1) {
        found = passed[c.name];
      }
    }
    o.require(found, positive + " missing or failing");
    for (const auto& cond : conds) {
      bool covered = false;
      for (const auto& c : cases) {
        bool names = std::find(c.falsifies.begin(), c.falsifies.end(), cond) != c.falsifies.end();
        if (names && c.expected.count(type) && c.expected.at(type) == 0 && passed[c.name]) {
          covered = true;
        }
      }
      o.require(covered, "no passing case falsifies " + cond);
    }
  }
  o.require(cases.size() >= required, "only " + std::to_string(cases.size()) + " cases");
  o.require(elapsed < 30.0, "suite took " + std::to_string(elapsed) + " s");
  if (o.ok) {
    o.detail << cases.size() << " cases, " << suite.cells.size() << " cells, " << required
             << " required, " << elapsed << " s";
  }
  return o;
}

// --- 2 -----------------------------------------------------------------------

Outcome false_positive_catalog() {
  Outcome o;
  auto suite = fixtures::run_fixture_suite(kFixtures, packs(), catalog());
  std::map<BehaviorType, std::set<std::string>> classes;
  size_t s2_cells = 0;
  for (const auto& c : suite.cells) {
    if (c.behaviorType == BehaviorType::kS2) {
      ++s2_cells;
      o.require(!c.fpClass, c.caseName + " labels an S2 false positive");
      o.require(c.passed(), c.caseName + " S2 mismatch");
      continue;
    }
    if (!c.fpClass) continue;
    o.require(c.passed() && c.actual >= 1, c.caseName + " is not reported");
    classes[c.behaviorType].insert(*c.fpClass);
  }
  const std::map<BehaviorType, size_t> wanted = {{BehaviorType::kS5, 5}, {BehaviorType::kS1, 3},
                                                 {BehaviorType::kS6, 1}, {BehaviorType::kS9, 1},
                                                 {BehaviorType::kS8, 2}};
  for (const auto& [type, n] : wanted) {
    o.require(classes[type].size() == n, std::string(to_string(type)) + " has " +
                                             std::to_string(classes[type].size()) + " classes");
  }
  o.require(s2_cells > 0, "no S2 cases");
  if (o.ok) o.detail << "12 classes reported, " << s2_cells << " S2 cells without false positives";
  return o;
}

// --- 3 -----------------------------------------------------------------------

Outcome similarity_oracle() {
  Outcome o;
  static const std::vector<std::string> vocab = {
      "int", "x", "y", "=", ";", "(", ")", "{", "}", "return", "if", "for", "i", "+", "<",
      "n", "0", "1", "a", "b", "while", "*", "const", "let", "->", "[", "]", "fn", "s", "t"};
  const size_t k = similarity::kDefaultGramLength;
  std::mt19937_64 rng(7340);
  auto draw = [&](size_t n) {
    std::vector<std::string> t;
    for (size_t i = 0; i < n; ++i) t.push_back(vocab[rng() % vocab.size()]);
    return t;
  };
  double min_margin = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    size_t total = 50 + rng() % 451;
    size_t lo = (total + 9) / 10;
    size_t snippet_len = lo + rng() % (total / 2 - lo + 1);
    auto snippet = draw(snippet_len);
    auto file = draw(total - snippet_len);
    size_t at = rng() % (file.size() + 1);
    file.insert(file.begin() + static_cast<long>(at), snippet.begin(), snippet.end());

    auto f = similarity::fingerprint(similarity::TokenStream{file, {}}, k);
    auto s = similarity::fingerprint(similarity::TokenStream{snippet, {}}, k);
    for (bool forward : {true, false}) {
      const auto& needle = forward ? f : s;
      const auto& hay = forward ? s : f;
      auto got = similarity::overlap(needle, hay);
      auto want = oracle::brute_force_containment(forward ? file : snippet, forward ? snippet : file, k);
      o.require(got.shared == want.shared && got.total == want.total,
                "trial " + std::to_string(trial) + " differs from brute force");
      double c = similarity::containment(needle, hay);
      o.require(c == static_cast<double>(want.shared) / static_cast<double>(want.total),
                "trial " + std::to_string(trial) + " ratio differs");
    }
    double grams = static_cast<double>(file.size() - k + 1);
    double bound = 0.10 - static_cast<double>(k - 1) / grams;
    double c = similarity::containment(f, s);
    o.require(c >= bound, "trial " + std::to_string(trial) + " below planted bound");
    min_margin = std::min(min_margin, c - bound);
  }
  if (o.ok) o.detail << "100 trials exact, smallest margin over bound " << min_margin;
  return o;
}

// --- 4 -----------------------------------------------------------------------

Outcome rule_engine_oracle() {
  Outcome o;
  std::mt19937_64 rng(1259);
  size_t nonempty = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto p = oracle::random_program(rng, 8, 30);
    try {
      auto rs = rules::build_rule_set(p.rules);
      auto fast = oracle::normalized(rules::evaluate(rs, p.base).relations);
      auto slow = oracle::normalized(oracle::naive_evaluate(p.rules, p.base));
      o.require(fast == slow, "program " + std::to_string(trial) + " differs");
      if (!fast.empty()) ++nonempty;
    } catch (const Error& e) {
      o.require(false, "program " + std::to_string(trial) + ": " + e.what());
    }
  }
  if (o.ok) o.detail << "200 programs equal, " << nonempty << " with derived facts, no fuel trip";
  return o;
}

// --- 5 -----------------------------------------------------------------------

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  std::string cmd = std::string("ETHOSCAN_TOKEN= ") + ETHOSCAN_CLI + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int w = pclose(p);
  r.status = WIFEXITED(w) ? WEXITSTATUS(w) : -1;
  return r;
}

Outcome determinism_and_round_trip() {
  Outcome o;
  auto tmp = std::filesystem::temp_directory_path() / "ethoscan_acceptance_rt.json";
  size_t snapshots = 0;
  for (const auto& c : fixtures::discover(kFixtures)) {
    for (const auto& path : c.snapshotPaths) {
      Snapshot a = load_snapshot(path);
      save_snapshot(a, tmp);
      Snapshot b = load_snapshot(tmp);
      o.require(a == b, path.string() + " changes on save/load");
      o.require(to_json(a) == to_json(b), path.string() + " json differs");
      ++snapshots;
    }
  }
  std::filesystem::remove(tmp);

  size_t runs = 0;
  for (const std::string name : {"s1_all_conditions", "s8_all_conditions", "clean", "s6_fp_restored_license"}) {
    std::string args = "check --snapshot " + (kFixtures / name / "snapshot.json").string() +
                       " --type all --format json --date 2022-01-01";
    auto first = run_cli(args);
    auto second = run_cli(args);
    o.require(first.status == 0 || first.status == 1 || first.status == 3,
              name + " exit " + std::to_string(first.status));
    o.require(!first.out.empty() && first.out == second.out, name + " reports differ");
    ++runs;
  }
  if (o.ok) o.detail << snapshots << " snapshots round-trip, " << runs << " report pairs identical";
  return o;
}

// --- 6 -----------------------------------------------------------------------

std::string synthetic_source(std::mt19937_64& rng, size_t index) {
  static const char* words[] = {"value", "count", "items", "total", "state", "node", "next", "left"};
  std::ostringstream s;
  s << "export function f" << index << "(input) {\n";
  for (int line = 0; line < 60; ++line) {
    s << "  const " << words[rng() % 8] << line << " = input." << words[rng() % 8] << " + "
      << rng() % 1000 << ";\n";
  }
  s << "  return input;\n}\n";
  return s.str();
}

std::pair<Snapshot, Snapshot> synthetic_pair() {
  Snapshot s1 = load_snapshot(kFixtures / "s1_all_conditions" / "snapshot.json");
  Snapshot s8 = load_snapshot(kFixtures / "s8_all_conditions" / "snapshot.json");
  Snapshot s = s1;
  std::mt19937_64 rng(200);
  for (size_t i = 0; s.repo.files.size() < 200; ++i) {
    std::string content = synthetic_source(rng, i);
    s.repo.files.push_back(FileContent{"src/gen/mod" + std::to_string(i) + ".js", content,
                                       static_cast<std::int64_t>(content.size())});
  }
  s.repo.fileCount = static_cast<std::int64_t>(s.repo.files.size());
  s.issues.clear();
  for (std::int64_t n = 1; n <= 50; ++n) {
    IssueFacts issue = (n % 2 ? s1.issues.at(0) : s8.issues.at(0));
    issue.number = n;
    s.issues.push_back(issue);
  }
  for (const auto& r : s8.relatedRepos) s.relatedRepos.push_back(r);
  for (const auto& [url, page] : s8.externalPages) s.externalPages[url] = page;

  Snapshot pair = s;
  pair.repo.owner = "mirror";
  pair.issues.clear();
  pair.relatedRepos.clear();
  return {s, pair};
}

Outcome throughput() {
  Outcome o;
  auto [primary, pair] = synthetic_pair();
  report::CheckInput in;
  in.primary = &primary;
  in.pair = &pair;
  in.requestedTypes = {"all"};
  auto start = Clock::now();
  auto r = report::run_check(in, context());
  double all = seconds_since(start);
  std::set<BehaviorType> seen;
  for (const auto& v : r.violations) seen.insert(v.behaviorType);
  o.require(seen.count(BehaviorType::kS1) && seen.count(BehaviorType::kS2) &&
                seen.count(BehaviorType::kS8),
            "synthetic input did not exercise S1, S2 and S8");
  o.require(all < 10.0, "all detectors took " + std::to_string(all) + " s");

  in.requestedTypes = {"s2"};
  start = Clock::now();
  report::run_check(in, context());
  double s2 = seconds_since(start);
  o.require(s2 < 60.0, "S2 took " + std::to_string(s2) + " s");
  if (o.ok) {
    o.detail << primary.repo.files.size() << " files, " << primary.issues.size()
             << " issues: all detectors " << all << " s, S2 pair " << s2 << " s";
  }
  return o;
}

// --- 7 -----------------------------------------------------------------------

Outcome s8_exclusions() {
  Outcome o;
  Snapshot base = load_snapshot(kFixtures / "s8_all_conditions" / "snapshot.json");
  const std::string linked = "https://github.com/promo-dev/fastcolors";
  const auto segments = detect::DetectorConfig::default_excluded_segments();
  const std::vector<std::string> tails = {"1", "42#issuecomment-7", "main/src/index.js", "v1.0.0",
                                          "a/b/c?x=1"};
  size_t urls = 0;
  auto count = [&](const std::string& url, const detect::DetectorConfig& cfg) {
    Snapshot s = base;
    auto& issue = s.issues.at(0);
    issue.bodyAndComments = {{issue.owner, "Please look at " + url + " for details."}};
    FactStore store = make_store(s);
    return detect::detect_s8(store, s.issues.at(0), context(cfg)).violations.size();
  };
  o.require(segments.size() == 7, "expected 7 excluded segments");
  o.require(count(linked, {}) == 1, "plain link is not flagged");
  for (const auto& seg : segments) {
    detect::DetectorConfig without;
    without.s8ExcludedPathSegments.clear();
    for (const auto& other : segments) {
      if (other != seg) without.s8ExcludedPathSegments.push_back(other);
    }
    for (const auto& tail : tails) {
      std::string url = linked + seg + tail;
      o.require(count(url, {}) == 0, url + " is flagged");
      o.require(count(url, without) == 1, url + " does not flip when " + seg + " is removed");
      ++urls;
    }
  }
  if (o.ok) o.detail << urls << " URLs suppressed, each flips once its segment is removed";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 detector-condition completeness", condition_completeness},
      {"2 false-positive catalog", false_positive_catalog},
      {"3 similarity oracle equivalence", similarity_oracle},
      {"4 rule-engine oracle equivalence", rule_engine_oracle},
      {"5 determinism and round-trip", determinism_and_round_trip},
      {"6 throughput", throughput},
      {"7 S8 exclusion exhaustiveness", s8_exclusions},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << "\n";
    if (!o.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
