#include "ethoscan/report.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::report {
namespace {

using nlohmann::json;

bool violation_less(const Violation& a, const Violation& b) {
  if (a.subject != b.subject) return a.subject < b.subject;
  if (a.behaviorType != b.behaviorType) return a.behaviorType < b.behaviorType;
  if (a.evidence != b.evidence) return a.evidence < b.evidence;
  return a.ruleTrace < b.ruleTrace;
}

json subject_json(const Subject& s) {
  json j = {{"repo", s.repo.full()}};
  if (s.issue) j["issue"] = *s.issue;
  return j;
}

void absorb(detect::DetectionResult&& r, RunReport& out) {
  for (auto& v : r.violations) out.violations.push_back(std::move(v));
  for (auto& d : r.diagnostics) out.diagnostics.push_back(std::move(d));
}

}  // namespace

std::vector<BehaviorType> resolve_types(const std::vector<std::string>& requested, Scope scope,
                                        bool has_pair, bool issue_input) {
  if (requested.empty()) throw Error(ErrorCode::kUsage, "at least one --type is required");
  std::set<BehaviorType> chosen;
  for (const auto& raw : requested) {
    std::string name = text::to_lower_ascii(raw);
    if (name == "all") {
      for (BehaviorType t : kAllBehaviors) {
        if (is_issue_level(t) && !covers_issues(scope)) continue;
        if (!is_issue_level(t) && issue_input) continue;
        if (t == BehaviorType::kS2 && !has_pair) continue;
        chosen.insert(t);
      }
      continue;
    }
    auto t = parse_behavior(name);
    if (!t) {
      throw Error(ErrorCode::kUsage, "unknown type '" + raw + "' (expected s1, s2, s5, s6, s8, s9 or all)");
    }
    if (*t == BehaviorType::kS2 && !has_pair) {
      throw Error(ErrorCode::kUsage, "type s2 needs a second repository (--pair)");
    }
    if (is_issue_level(*t) && !covers_issues(scope)) {
      throw Error(ErrorCode::kUsage, "type " + text::to_lower_ascii(to_string(*t)) +
                                         " is issue-level but the snapshot was captured at repo level");
    }
    chosen.insert(*t);
  }
  return {chosen.begin(), chosen.end()};
}

RunReport run_check(const CheckInput& input, const detect::DetectorContext& ctx,
                    bool include_timings) {
  if (!input.primary) throw Error(ErrorCode::kUsage, "no input snapshot");
  ctx.config.validate();
  const Snapshot& primary = *input.primary;
  Scope scope = primary.scope;
  auto types = resolve_types(input.requestedTypes, scope, input.pair != nullptr, input.issue.has_value());

  std::vector<const Snapshot*> all = {input.primary};
  if (input.pair) all.push_back(input.pair);
  FactStore store = make_store(all);
  PageCache pages = primary.externalPages;
  if (input.pair) pages.insert(input.pair->externalPages.begin(), input.pair->externalPages.end());

  const RepoId id = primary.repo.id();
  std::vector<const IssueFacts*> issues;
  if (input.issue) {
    const IssueFacts* found = store.find_issue(id, *input.issue);
    if (!found) {
      throw Error(ErrorCode::kUsage, "issue #" + std::to_string(*input.issue) + " is not in the snapshot of " +
                                         id.full());
    }
    issues.push_back(found);
  } else {
    for (const auto& i : store.issues_of(id)) issues.push_back(&i);
  }

  RunReport out;
  out.toolVersion = ETHOSCAN_VERSION;
  out.evaluationDate = ctx.evaluationDate;
  out.includeTimings = include_timings;
  if (input.issue) {
    out.inputs.push_back(Subject{id, input.issue}.describe());
  } else {
    out.inputs.push_back(id.full());
  }
  if (input.pair) out.inputs.push_back(input.pair->repo.id().full());

  for (BehaviorType t : types) {
    auto start = std::chrono::steady_clock::now();
    switch (t) {
      case BehaviorType::kS1:
        for (const auto* i : issues) absorb(detect::detect_s1(store, *i, pages, ctx), out);
        break;
      case BehaviorType::kS2:
        absorb(detect::detect_s2(store, id, input.pair->repo.id(), ctx), out);
        break;
      case BehaviorType::kS5:
        absorb(detect::detect_s5(store, id, ctx), out);
        break;
      case BehaviorType::kS6:
        absorb(detect::detect_s6(store, id, ctx), out);
        break;
      case BehaviorType::kS8:
        for (const auto* i : issues) absorb(detect::detect_s8(store, *i, ctx), out);
        break;
      case BehaviorType::kS9:
        absorb(detect::detect_s9(store, id, pages, ctx), out);
        break;
    }
    std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
    out.timings[std::string(to_string(t))] = ms.count();
  }

  std::sort(out.violations.begin(), out.violations.end(), violation_less);
  std::sort(out.diagnostics.begin(), out.diagnostics.end(),
            [](const detect::Diagnostic& a, const detect::Diagnostic& b) {
              if (a.subject != b.subject) return a.subject < b.subject;
              return a < b;
            });
  return out;
}

json to_json(const RunReport& r) {
  json j;
  j["toolVersion"] = r.toolVersion;
  j["evaluationDate"] = format_date(r.evaluationDate);
  j["inputs"] = r.inputs;
  j["violations"] = json::array();
  for (const auto& v : r.violations) {
    json ev = json::array();
    for (const auto& e : v.evidence) {
      json item = {{"label", e.label}, {"value", e.value}};
      if (e.location) item["location"] = *e.location;
      ev.push_back(std::move(item));
    }
    j["violations"].push_back({
        {"behaviorType", std::string(to_string(v.behaviorType))},
        {"status", kStatusWording},
        {"subject", subject_json(v.subject)},
        {"evidence", std::move(ev)},
        {"ruleTrace", v.ruleTrace},
        {"requiresHumanConfirmation", v.behaviorType == BehaviorType::kS8},
    });
  }
  j["diagnostics"] = json::array();
  for (const auto& d : r.diagnostics) {
    json item = {{"behaviorType", std::string(to_string(d.behaviorType))},
                 {"status", "cannot evaluate"},
                 {"subject", subject_json(d.subject)},
                 {"reason", d.reason}};
    if (d.location) item["location"] = *d.location;
    j["diagnostics"].push_back(std::move(item));
  }
  if (r.includeTimings) {
    json t = json::object();
    for (const auto& [k, ms] : r.timings) t[k] = ms;
    j["timings"] = std::move(t);
  }
  return j;
}

std::string render_json(const RunReport& r) {
  return to_json(r).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string render_text(const RunReport& r) {
  std::ostringstream os;
  os << "ethoscan " << r.toolVersion << ", evaluation date " << format_date(r.evaluationDate) << "\n";
  os << "inputs:";
  for (const auto& i : r.inputs) os << " " << i;
  os << "\n";
  for (const auto& v : r.violations) {
    os << "\nPOTENTIAL VIOLATION " << to_string(v.behaviorType) << " " << v.subject.describe() << "\n";
    if (v.behaviorType == BehaviorType::kS8) os << "  ! requires human confirmation\n";
    for (const auto& e : v.evidence) {
      os << "  " << e.label << ": " << e.value;
      if (e.location && *e.location != e.value) os << " (" << *e.location << ")";
      os << "\n";
    }
    os << "  rule trace:\n";
    for (const auto& t : v.ruleTrace) os << "    " << t << "\n";
  }
  if (!r.diagnostics.empty()) os << "\n";
  for (const auto& d : r.diagnostics) {
    os << "CANNOT EVALUATE " << to_string(d.behaviorType) << " " << d.subject.describe() << ": "
       << d.reason;
    if (d.location) os << " (" << *d.location << ")";
    os << "\n";
  }
  if (r.includeTimings) {
    os << "\ntimings:";
    for (const auto& [k, ms] : r.timings) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " %s=%.1fms", k.c_str(), ms);
      os << buf;
    }
    os << "\n";
  }
  os << "\n" << r.violations.size() << " potential violation(s), " << r.diagnostics.size()
     << " diagnostic(s)\n";
  return os.str();
}

int exit_status(const RunReport& r) {
  if (!r.violations.empty()) return 1;
  if (!r.diagnostics.empty()) return 3;
  return 0;
}

}  // namespace ethoscan::report
