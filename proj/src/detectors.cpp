#include "ethoscan/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/links.hpp"
#include "ethoscan/paths.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::detect {
namespace {

using rules::Database;
using rules::DerivedFacts;
using rules::Tuple;
using rules::Value;

Value str(std::string s) { return Value{std::move(s)}; }
Value num(std::int64_t n) { return Value{n}; }

struct PackRun {
  Database db;
  DerivedFacts derived;
};

PackRun run_pack(const FactStore& store, const rules::RuleSet& pack,
                 const std::function<void(Database&)>& helpers) {
  PackRun run;
  run.db = rules::base_facts(store);
  declare_helper_predicates(run.db);
  helpers(run.db);
  run.derived = rules::evaluate(pack, run.db);
  return run;
}

bool tuple_matches(const rules::Atom& atom, const Tuple& t) {
  if (atom.args.size() != t.size()) return false;
  for (size_t i = 0; i < t.size(); ++i) {
    if (auto* v = std::get_if<Value>(&atom.args[i]); v && !(*v == t[i])) return false;
  }
  return true;
}

// Flattened proof: the violation rule's grounded body, followed by the
// bodies that derived each positive derived literal in it.
void collect_proof(const PackRun& run, const std::string& pred, const Tuple& t,
                   std::vector<std::string>& out, std::set<std::string>& seen) {
  auto it = run.derived.provenance.find({pred, t});
  if (it == run.derived.provenance.end()) return;
  std::vector<std::pair<std::string, Tuple>> children;
  for (const auto& entry : it->second.trace) {
    if (!seen.insert(entry).second) continue;
    out.push_back(entry);
    rules::Literal lit = rules::parse_literal(entry);
    if (lit.negated || lit.builtin || !run.derived.relations.count(lit.atom.predicate)) continue;
    for (const auto& cand : run.derived.relation(lit.atom.predicate)) {
      if (tuple_matches(lit.atom, cand)) {
        children.emplace_back(lit.atom.predicate, cand);
        break;
      }
    }
  }
  for (const auto& [p, c] : children) collect_proof(run, p, c, out, seen);
}

std::vector<std::string> proof(const PackRun& run, const std::string& pred, const Tuple& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_proof(run, pred, t, out, seen);
  return out;
}

const std::string& as_str(const Value& v) { return std::get<std::string>(v); }
std::int64_t as_int(const Value& v) { return std::get<std::int64_t>(v); }

std::string ratio_text(std::int64_t ppm) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(ppm) / 1e6);
  return buf;
}

const FileContent* root_named(const RepositoryFacts& repo, const std::optional<FileContent>& field,
                              const std::vector<std::string>& names) {
  if (field && text::is_root_path(field->path)) return &*field;
  for (const auto& n : names) {
    for (const auto& f : repo.files) {
      if (text::is_root_path(f.path) && text::to_lower_ascii(f.path) == text::to_lower_ascii(n)) {
        return &f;
      }
    }
  }
  return nullptr;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read rule file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pack_file(BehaviorType t) { return text::to_lower_ascii(to_string(t)) + ".rules"; }

size_t skip_tag(std::string_view s, size_t pos) {
  size_t close = s.find('>', pos);
  return close == std::string_view::npos ? s.size() : close + 1;
}

std::string strip_tags(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size();) {
    if (s[i] == '<') {
      i = skip_tag(s, i);
    } else {
      out += s[i++];
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> DetectorConfig::default_excluded_segments() {
  return {"/issues/", "/pull/", "/commit/", "/tree/", "/releases/", "/blob/", "/runs/"};
}

const std::string& DetectorConfig::so_pattern() const {
  return soLinkPattern.empty() ? links::default_so_link_pattern() : soLinkPattern;
}

void DetectorConfig::validate() const {
  if (!(s1Threshold > 0.0 && s1Threshold <= 1.0)) {
    throw Error(ErrorCode::kUsage, "s1 threshold must be in (0, 1]");
  }
  if (s9StaleDays <= 0) throw Error(ErrorCode::kUsage, "s9 stale days must be positive");
  if (gramLength == 0) throw Error(ErrorCode::kUsage, "gram length must be positive");
  for (const auto& s : s8ExcludedPathSegments) {
    if (s.empty()) throw Error(ErrorCode::kUsage, "empty excluded path segment");
  }
  links::find_links("", so_pattern());  // compiles the pattern
}

void declare_helper_predicates(Database& db) {
  static const std::pair<const char*, size_t> kHelpers[] = {
      {"target_repo", 1},   {"so_link", 4},        {"so_answer_owner", 2},
      {"snippet_match", 4}, {"link_in_file", 3},   {"s1_threshold_ppm", 1},
      {"identical", 2},     {"repo_license", 3},   {"license_change", 4},
      {"changelog_mentions_license", 1},           {"repo_link", 4},
      {"excluded_segment", 1}, {"eval_date", 1},   {"s9_stale_days", 1},
      {"store_link", 2},    {"paid_marker", 2},
  };
  for (const auto& [name, arity] : kHelpers) db.declare(name, arity);
}

RulePacks RulePacks::from_sources(const std::map<BehaviorType, std::string>& packs,
                                  const std::vector<std::pair<std::string, std::string>>& extra) {
  RulePacks out;
  for (BehaviorType t : kAllBehaviors) {
    auto it = packs.find(t);
    if (it == packs.end()) {
      throw Error(ErrorCode::kUsage, "missing rule pack for " + std::string(to_string(t)));
    }
    std::vector<std::pair<std::string, std::string>> sources = {{pack_file(t), it->second}};
    sources.insert(sources.end(), extra.begin(), extra.end());
    out.packs_.emplace(t, rules::parse_rules(sources));
  }
  return out;
}

RulePacks RulePacks::load(const std::filesystem::path& dir,
                          const std::vector<std::filesystem::path>& extra) {
  std::map<BehaviorType, std::string> packs;
  for (BehaviorType t : kAllBehaviors) packs[t] = read_file(dir / pack_file(t));
  std::vector<std::pair<std::string, std::string>> extras;
  for (const auto& p : extra) extras.emplace_back(p.string(), read_file(p));
  return from_sources(packs, extras);
}

RulePacks RulePacks::load_default(const std::vector<std::filesystem::path>& extra) {
  return load(data_dir() / "rules", extra);
}

const rules::RuleSet& RulePacks::pack(BehaviorType t) const { return packs_.at(t); }

bool is_excluded_link(std::string_view url, const std::vector<std::string>& segments) {
  return std::any_of(segments.begin(), segments.end(),
                     [&](const std::string& s) { return url.find(s) != std::string_view::npos; });
}

// --- Stack Overflow pages ----------------------------------------------------

std::string html_unescape(std::string_view s) {
  static const std::pair<std::string_view, std::string_view> kNamed[] = {
      {"&lt;", "<"}, {"&gt;", ">"}, {"&amp;", "&"}, {"&quot;", "\""}, {"&apos;", "'"},
      {"&nbsp;", " "}};
  std::string out;
  for (size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    bool done = false;
    for (const auto& [ent, rep] : kNamed) {
      if (s.substr(i, ent.size()) == ent) {
        out += rep;
        i += ent.size();
        done = true;
        break;
      }
    }
    if (done) continue;
    size_t semi = s.find(';', i);
    if (s.substr(i, 2) == "&#" && semi != std::string_view::npos && semi - i <= 10) {
      std::string_view digits = s.substr(i + 2, semi - i - 2);
      unsigned long cp = 0;
      bool ok = !digits.empty();
      try {
        if (ok && (digits[0] == 'x' || digits[0] == 'X')) {
          cp = std::stoul(std::string(digits.substr(1)), nullptr, 16);
        } else if (ok) {
          cp = std::stoul(std::string(digits), nullptr, 10);
        }
      } catch (const std::exception&) {
        ok = false;
      }
      if (ok && cp > 0 && cp <= 0x10FFFF) {
        if (cp < 0x80) {
          out += static_cast<char>(cp);
        } else if (cp < 0x800) {
          out += static_cast<char>(0xC0 | (cp >> 6));
          out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
          out += static_cast<char>(0xE0 | (cp >> 12));
          out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
          out += static_cast<char>(0xF0 | (cp >> 18));
          out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
          out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        i = semi + 1;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

std::optional<SoAnswer> parse_so_answer(std::string_view html,
                                        const std::optional<std::string>& answer_id) {
  constexpr std::string_view kAnswer = "id=\"answer-";
  size_t start = std::string_view::npos;
  if (answer_id) start = html.find(std::string(kAnswer) + *answer_id + "\"");
  if (start == std::string_view::npos) start = html.find(kAnswer);
  size_t end = html.size();
  if (start == std::string_view::npos) {
    start = 0;
  } else {
    end = std::min(html.size(), html.find(kAnswer, start + 1));
  }
  std::string_view block = html.substr(start, end - start);

  SoAnswer ans;
  for (size_t pos = 0;;) {
    size_t pre = block.find("<pre", pos);
    if (pre == std::string_view::npos) break;
    size_t code = block.find("<code", pre);
    size_t pre_end = block.find("</pre>", pre);
    if (code == std::string_view::npos || (pre_end != std::string_view::npos && code > pre_end)) {
      pos = pre + 4;
      continue;
    }
    size_t body = skip_tag(block, code);
    size_t close = block.find("</code>", body);
    if (close == std::string_view::npos) break;
    if (!ans.code.empty()) ans.code += "\n";
    ans.code += html_unescape(strip_tags(block.substr(body, close - body)));
    pos = close;
  }

  size_t details = block.rfind("user-details");
  if (details != std::string_view::npos) {
    size_t tag_end = skip_tag(block, details);
    size_t anchor = block.find("<a ", tag_end);
    size_t div_end = block.find("</div>", tag_end);
    std::string_view name;
    if (anchor != std::string_view::npos && (div_end == std::string_view::npos || anchor < div_end)) {
      size_t text_start = skip_tag(block, anchor);
      name = block.substr(text_start, block.find("</a>", text_start) - text_start);
    } else {
      name = block.substr(tag_end, block.find('<', tag_end) - tag_end);
    }
    ans.owner = text::collapse_whitespace(html_unescape(strip_tags(name)));
  }
  if (ans.code.empty() && ans.owner.empty()) return std::nullopt;
  return ans;
}

// --- S1 ----------------------------------------------------------------------

DetectionResult detect_s1(const FactStore& store, const IssueFacts& issue, const PageCache& pages,
                          const DetectorContext& ctx) {
  const DetectorConfig& cfg = ctx.config;
  const RepositoryFacts& repo = store.repo(issue.repo);
  const Subject subject{issue.repo, issue.number};
  const std::string rid = issue.repo.full();
  DetectionResult result;

  std::vector<std::tuple<std::string, std::string>> link_posts;  // (author, w)
  std::vector<std::string> ws;
  for (const auto& post : issue.bodyAndComments) {
    for (auto& w : links::find_links(post.text, cfg.so_pattern())) {
      link_posts.emplace_back(post.author.login, w);
      if (std::find(ws.begin(), ws.end(), w) == ws.end()) ws.push_back(w);
    }
  }
  if (ws.empty()) return result;

  struct FileFp {
    const FileContent* file;
    std::string ext;
    similarity::FingerprintSet fp;
    std::string text;
  };
  std::vector<FileFp> files;
  for (const auto& f : repo.files) {
    if (!f.content || text::looks_binary(*f.content)) continue;
    FileFp ff{&f, text::extension_of(f.path), {}, f.text()};
    ff.fp = similarity::fingerprint(similarity::tokenize(ff.text, ff.ext), cfg.gramLength,
                                    cfg.winnowWindow);
    files.push_back(std::move(ff));
  }

  std::map<std::string, std::string> owners;
  std::vector<std::tuple<std::string, std::string, std::int64_t>> matches;  // w, path, ppm
  std::vector<std::pair<std::string, std::string>> cited;                  // path, w
  for (const auto& w : ws) {
    auto page = pages.find(w);
    if (page == pages.end() || !page->second) {
      result.diagnostics.push_back({BehaviorType::kS1, subject,
                                    "Stack Overflow page unavailable; cannot evaluate", w});
      continue;
    }
    auto answer = parse_so_answer(*page->second, links::so_answer_id(w));
    if (!answer || answer->owner.empty()) {
      result.diagnostics.push_back({BehaviorType::kS1, subject,
                                    "no answer owner found on the cached page; cannot evaluate", w});
      continue;
    }
    owners[w] = answer->owner;
    std::map<std::string, similarity::FingerprintSet> snippet_by_ext;
    bool too_short = false;
    for (const auto& ff : files) {
      if (ff.text.find(w) != std::string::npos) cited.emplace_back(ff.file->path, w);
      auto it = snippet_by_ext.find(ff.ext);
      if (it == snippet_by_ext.end()) {
        it = snippet_by_ext
                 .emplace(ff.ext, similarity::fingerprint(similarity::tokenize(answer->code, ff.ext),
                                                          cfg.gramLength, cfg.winnowWindow))
                 .first;
      }
      if (it->second.hashes.empty()) {
        too_short = true;
        continue;
      }
      similarity::Overlap o = similarity::overlap(it->second, ff.fp);
      if (o.shared == 0) continue;
      auto ppm = static_cast<std::int64_t>((static_cast<unsigned long long>(o.shared) * 1000000ULL) /
                                           o.total);
      matches.emplace_back(w, ff.file->path, ppm);
    }
    if (too_short && files.size() > 0) {
      result.diagnostics.push_back({BehaviorType::kS1, subject,
                                    "answer code shorter than one gram for some file types", w});
    }
  }

  const auto threshold = static_cast<std::int64_t>(std::llround(cfg.s1Threshold * 1e6));
  PackRun run = run_pack(store, ctx.rules.pack(BehaviorType::kS1), [&](Database& db) {
    for (const auto& [author, w] : link_posts) {
      db.add("so_link", {str(rid), num(issue.number), str(author), str(w)});
    }
    for (const auto& [w, owner] : owners) db.add("so_answer_owner", {str(w), str(owner)});
    for (const auto& [w, path, ppm] : matches) {
      db.add("snippet_match", {str(rid), str(w), str(path), num(ppm)});
    }
    for (const auto& [path, w] : cited) db.add("link_in_file", {str(rid), str(path), str(w)});
    db.add("s1_threshold_ppm", {num(threshold)});
  });

  std::set<std::pair<std::string, std::string>> emitted;
  for (const auto& t : run.derived.relation("violation_s1")) {
    if (as_str(t[0]) != rid || as_int(t[1]) != issue.number) continue;
    const std::string& w = as_str(t[2]);
    const std::string& path = as_str(t[3]);
    if (!emitted.insert({w, path}).second) continue;
    Violation v;
    v.behaviorType = BehaviorType::kS1;
    v.subject = subject;
    v.evidence = {
        {"so_link", w, w},
        {"copied_file", path, path},
        {"containment", ratio_text(as_int(t[6])), std::nullopt},
        {"answer_owner", as_str(t[5]), std::nullopt},
        {"link_author", as_str(t[4]), std::nullopt},
    };
    v.ruleTrace = proof(run, "violation_s1", t);
    result.violations.push_back(std::move(v));
  }
  return result;
}

// --- S2 ----------------------------------------------------------------------

namespace {

// Same source paths and, per file, the same token stream (comments and layout
// ignored).
bool token_identical(const RepositoryFacts& a, const RepositoryFacts& b,
                     const similarity::ExtensionSet& exts, size_t& files) {
  auto collect = [&](const RepositoryFacts& r) {
    std::map<std::string, const FileContent*> out;
    for (const auto& f : r.files) {
      if (similarity::is_source_path(f.path, exts)) out[f.path] = &f;
    }
    return out;
  };
  auto left = collect(a);
  auto right = collect(b);
  files = left.size();
  if (left.size() != right.size()) return false;
  for (auto li = left.begin(), ri = right.begin(); li != left.end(); ++li, ++ri) {
    if (li->first != ri->first) return false;
    std::string ext = text::extension_of(li->first);
    if (similarity::tokenize(li->second->text(), ext).tokens !=
        similarity::tokenize(ri->second->text(), ext).tokens) {
      return false;
    }
  }
  return true;
}

}  // namespace

DetectionResult detect_s2(const FactStore& store, const RepoId& r1, const RepoId& r2,
                          const DetectorContext& ctx) {
  if (r1 == r2) throw Error(ErrorCode::kUsage, "soft-fork check needs two different repositories");
  const RepositoryFacts& a = store.repo(r1);
  const RepositoryFacts& b = store.repo(r2);
  DetectionResult result;

  similarity::TreeComparison cmp = similarity::compare_trees(a, b, ctx.config.sourceExtensions);
  bool same = cmp.identical;
  size_t files = cmp.source_files;
  if (!same && !ctx.config.s2RequireExact) {
    same = token_identical(a, b, ctx.config.sourceExtensions, files);
  }
  // Two repositories without source code are not copies of anything.
  same = same && files > 0;

  PackRun run = run_pack(store, ctx.rules.pack(BehaviorType::kS2), [&](Database& db) {
    if (same) db.add("identical", {str(r1.full()), str(r2.full())});
  });

  const Tuple key = {str(r1.full()), str(r2.full())};
  if (run.derived.relation("violation_s2").count(key)) {
    Violation v;
    v.behaviorType = BehaviorType::kS2;
    v.subject = Subject{r1, std::nullopt};
    v.evidence = {
        {"pair_repo", r2.full(), std::nullopt},
        {"matched_source_files", std::to_string(files), std::nullopt},
        {"fork_relation",
         r2.full() + " is not in the fork list of " + r1.full() + "; parent of " + r2.full() +
             ": " + b.parentFullName.value_or("none"),
         std::nullopt},
    };
    v.ruleTrace = proof(run, "violation_s2", key);
    result.violations.push_back(std::move(v));
  }
  return result;
}

// --- S5 ----------------------------------------------------------------------

DetectionResult detect_s5(const FactStore& store, const RepoId& id, const DetectorContext& ctx) {
  const RepositoryFacts& repo = store.repo(id);
  DetectionResult result;
  auto lic = license::detect_repo_license(repo, ctx.catalog);

  PackRun run = run_pack(store, ctx.rules.pack(BehaviorType::kS5), [&](Database& db) {
    db.add("target_repo", {str(id.full())});
    if (lic) {
      db.add("repo_license", {str(id.full()), str(lic->spdxId),
                              str(std::string(license::to_string(lic->source)))});
    }
  });

  const Tuple key = {str(id.full())};
  if (run.derived.relation("violation_s5").count(key)) {
    Violation v;
    v.behaviorType = BehaviorType::kS5;
    v.subject = Subject{id, std::nullopt};
    v.evidence.push_back({"license_file", "no LICENSE file in the repository root", std::nullopt});
    const FileContent* readme = root_named(repo, repo.readmeFile, license::readme_file_names());
    if (readme) {
      v.evidence.push_back({"readme", "no license name found", readme->path});
    } else {
      v.evidence.push_back({"readme", "no README in the repository root", std::nullopt});
    }
    v.evidence.push_back({"file_count", std::to_string(repo.fileCount), std::nullopt});
    v.ruleTrace = proof(run, "violation_s5", key);
    result.violations.push_back(std::move(v));
  }
  return result;
}

// --- S6 ----------------------------------------------------------------------

DetectionResult detect_s6(const FactStore& store, const RepoId& id, const DetectorContext& ctx) {
  const RepositoryFacts& repo = store.repo(id);
  DetectionResult result;
  auto events = license::extract_license_changes(repo, ctx.catalog);
  const FileContent* changelog = root_named(repo, repo.changelogFile, license::changelog_file_names());
  bool announced = changelog && ctx.catalog.match_name(changelog->text()).has_value();

  PackRun run = run_pack(store, ctx.rules.pack(BehaviorType::kS6), [&](Database& db) {
    for (const auto& e : events) {
      db.add("license_change",
             {str(id.full()), str(e.commit.sha), str(e.fromLicense), str(e.toLicense)});
    }
    if (announced) db.add("changelog_mentions_license", {str(id.full())});
  });

  // Licenses the repository has carried before each event.
  std::map<std::string, std::set<std::string>> earlier;
  std::set<std::string> held;
  for (const auto& e : events) {
    held.insert(e.fromLicense);
    earlier[e.commit.sha] = held;
    held.insert(e.toLicense);
  }

  for (const auto& e : events) {
    const Tuple key = {str(id.full()), str(e.commit.sha), str(e.fromLicense), str(e.toLicense)};
    if (!run.derived.relation("violation_s6").count(key)) continue;
    Violation v;
    v.behaviorType = BehaviorType::kS6;
    v.subject = Subject{id, std::nullopt};
    v.evidence = {
        {"commit", e.commit.sha, std::nullopt},
        {"license_change", e.fromLicense + " -> " + e.toLicense,
         repo.licenseFile ? std::optional(repo.licenseFile->path) : std::nullopt},
        {"pull_request_count", std::to_string(e.commit.pullRequestCount), std::nullopt},
        {"changelog", changelog ? "no license name mentioned" : "no changelog in the repository root",
         changelog ? std::optional(changelog->path) : std::nullopt},
    };
    if (earlier[e.commit.sha].count(e.toLicense)) {
      v.evidence.push_back({"restores_previous_license", e.toLicense, std::nullopt});
    }
    v.ruleTrace = proof(run, "violation_s6", key);
    result.violations.push_back(std::move(v));
  }
  return result;
}

// --- S8 ----------------------------------------------------------------------

DetectionResult detect_s8(const FactStore& store, const IssueFacts& issue,
                          const DetectorContext& ctx) {
  const DetectorConfig& cfg = ctx.config;
  const RepoId& r1 = issue.repo;
  store.repo(r1);
  const Subject subject{r1, issue.number};
  DetectionResult result;

  struct Candidate {
    std::string link;
    RepoId repo;
  };
  std::vector<Candidate> candidates;
  std::vector<RepoId> distinct;
  for (const auto& post : issue.bodyAndComments) {
    if (post.author != issue.owner) continue;
    for (const auto& link : links::find_repo_links(post.text)) {
      auto r2 = links::repo_of_link(link);
      if (!r2) continue;
      if (*r2 != r1 && std::find(distinct.begin(), distinct.end(), *r2) == distinct.end()) {
        if (distinct.size() >= cfg.s8MaxLinksPerIssue) continue;
        distinct.push_back(*r2);
      }
      candidates.push_back({link, *r2});
    }
  }
  if (candidates.empty()) return result;

  PackRun run = run_pack(store, ctx.rules.pack(BehaviorType::kS8), [&](Database& db) {
    for (const auto& c : candidates) {
      db.add("repo_link", {str(r1.full()), num(issue.number), str(c.link), str(c.repo.full())});
    }
    for (const auto& s : cfg.s8ExcludedPathSegments) db.add("excluded_segment", {str(s)});
  });

  const auto& found = run.derived.relation("violation_s8");
  for (const auto& c : candidates) {
    for (const auto& t : found) {
      if (as_str(t[0]) != r1.full() || as_int(t[1]) != issue.number || as_str(t[3]) != c.link ||
          as_str(t[4]) != c.repo.full()) {
        continue;
      }
      const std::string& u = as_str(t[2]);
      Violation v;
      v.behaviorType = BehaviorType::kS8;
      v.subject = subject;
      v.evidence = {
          {"repo_link", c.link, c.link},
          {"linked_repo", c.repo.full(), std::nullopt},
          {"issue_opener", u, std::nullopt},
          {"contributor_proof", u + " is a contributor of " + c.repo.full() + " and not of " + r1.full(),
           std::nullopt},
          {"confirmation", "requires human confirmation: disclosure of affiliation in prose is not analyzed",
           std::nullopt},
      };
      v.ruleTrace = proof(run, "violation_s8", t);
      result.violations.push_back(std::move(v));
      return result;
    }
  }

  if (!store.is_contributor(issue.owner, r1)) {
    std::set<std::string> reported;
    for (const auto& c : candidates) {
      if (c.repo == r1 || store.has_repo(c.repo) || is_excluded_link(c.link, cfg.s8ExcludedPathSegments)) {
        continue;
      }
      if (std::find(distinct.begin(), distinct.end(), c.repo) == distinct.end()) continue;
      if (!reported.insert(c.repo.full()).second) continue;
      result.diagnostics.push_back({BehaviorType::kS8, subject,
                                    "linked repository " + c.repo.full() +
                                        " is not in the snapshot; cannot evaluate",
                                    c.link});
    }
  }
  return result;
}

// --- S9 ----------------------------------------------------------------------

DetectionResult detect_s9(const FactStore& store, const RepoId& id, const PageCache& pages,
                          const DetectorContext& ctx) {
  const DetectorConfig& cfg = ctx.config;
  const RepositoryFacts& repo = store.repo(id);
  DetectionResult result;

  std::vector<std::string> store_links;
  auto add_links = [&](std::string_view src) {
    for (auto& l : links::find_store_links(src)) {
      if (std::find(store_links.begin(), store_links.end(), l) == store_links.end()) {
        store_links.push_back(std::move(l));
      }
    }
  };
  for (const auto& l : repo.externalLinks) add_links(l);
  if (const FileContent* readme = root_named(repo, repo.readmeFile, license::readme_file_names())) {
    add_links(readme->text());
  }

  std::vector<std::string> unavailable;
  std::vector<std::pair<std::string, std::string>> markers;
  for (const auto& l : store_links) {
    auto page = pages.find(l);
    if (page == pages.end() || !page->second) {
      unavailable.push_back(l);
      continue;
    }
    for (const auto& m : cfg.paidMarkers) {
      if (text::icontains(*page->second, m)) markers.emplace_back(l, m);
    }
  }

  PackRun run = run_pack(store, ctx.rules.pack(BehaviorType::kS9), [&](Database& db) {
    db.add("target_repo", {str(id.full())});
    db.add("eval_date", {Value{ctx.evaluationDate}});
    db.add("s9_stale_days", {num(cfg.s9StaleDays)});
    for (const auto& l : store_links) db.add("store_link", {str(id.full()), str(l)});
    for (const auto& [l, m] : markers) db.add("paid_marker", {str(l), str(m)});
  });

  for (const auto& t : run.derived.relation("violation_s9")) {
    if (as_str(t[0]) != id.full()) continue;
    Date released = std::get<Date>(t[1]);
    Violation v;
    v.behaviorType = BehaviorType::kS9;
    v.subject = Subject{id, std::nullopt};
    v.evidence = {
        {"latest_release", format_date(released),
         repo.latestRelease ? std::optional(repo.latestRelease->tag) : std::nullopt},
        {"release_age_days", std::to_string(days_between(released, ctx.evaluationDate)), std::nullopt},
        {"store_link", as_str(t[2]), as_str(t[2])},
        {"paid_marker", as_str(t[3]), std::nullopt},
    };
    v.ruleTrace = proof(run, "violation_s9", t);
    result.violations.push_back(std::move(v));
    return result;
  }

  if (run.derived.relation("candidate").count({str(id.full())})) {
    for (const auto& l : unavailable) {
      result.diagnostics.push_back(
          {BehaviorType::kS9, Subject{id, std::nullopt}, "store listing unavailable; cannot evaluate", l});
    }
  }
  return result;
}

}  // namespace ethoscan::detect
