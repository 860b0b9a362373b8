#include <algorithm>
#include <map>
#include <optional>
#include <regex>

#include "ethoscan/errors.hpp"
#include "ethoscan/rules.hpp"

namespace ethoscan::rules {
namespace {

const std::set<Tuple> kEmpty;

const std::vector<BuiltinSpec> kBuiltins = {
    {"string_contains", 2, 2}, {"regex_match", 2, 2}, {"date_before", 2, 2},
    {"days_between", 3, 2},    {"lt", 2, 2},          {"gt", 2, 2},
    {"eq", 2, 2},              {"starts_with", 2, 2},
};

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "integer";
    case 1: return "string";
    default: return "date";
  }
}

[[noreturn]] void type_error(std::string_view builtin, const std::string& what) {
  throw Error(ErrorCode::kBuiltinType, std::string(builtin) + ": " + what);
}

const std::string& as_string(std::string_view builtin, const Value& v) {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  type_error(builtin, std::string("expected a string, got ") + type_name(v) + " " + render(v));
}

Date as_date(std::string_view builtin, const Value& v) {
  if (auto* d = std::get_if<Date>(&v)) return *d;
  type_error(builtin, std::string("expected a date, got ") + type_name(v) + " " + render(v));
}

// Orders same-typed values; mixing types is a type error.
int compare(std::string_view builtin, const Value& a, const Value& b) {
  if (a.index() != b.index()) {
    type_error(builtin, std::string("cannot compare ") + type_name(a) + " with " + type_name(b));
  }
  if (a < b) return -1;
  return b < a ? 1 : 0;
}

const std::regex& compiled(const std::string& pattern) {
  thread_local std::map<std::string, std::regex> cache;
  auto it = cache.find(pattern);
  if (it == cache.end()) {
    try {
      it = cache.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first;
    } catch (const std::regex_error& e) {
      type_error("regex_match", "invalid pattern '" + pattern + "': " + e.what());
    }
  }
  return it->second;
}

struct PlanStep {
  size_t literal;
  bool delta = false;   // ranges over the previous iteration's new tuples
  bool old = false;     // ranges over tuples known before that iteration
};

class Evaluator {
 public:
  Evaluator(const RuleSet& rules, const Database& base, EvalOptions options)
      : rules_(rules), base_(base), fuel_(options.fuel) {}

  DerivedFacts run() {
    check_predicates();
    for (const auto& p : rules_.derived_predicates()) out_.relations[p];
    for (const auto& stratum : rules_.strata()) run_stratum(stratum);
    return std::move(out_);
  }

 private:
  using Binding = std::map<std::string, Value>;

  void check_predicates() const {
    for (const auto& r : rules_.rules()) {
      for (const auto& l : r.body) {
        if (l.builtin || rules_.defines(l.atom.predicate)) continue;
        auto it = base_.arities().find(l.atom.predicate);
        if (it == base_.arities().end()) {
          throw Error(ErrorCode::kRuleSemantics,
                      r.location.source + ":" + std::to_string(r.location.line) +
                          ": unknown predicate " + l.atom.predicate + "/" +
                          std::to_string(l.atom.args.size()));
        }
        if (it->second != l.atom.args.size()) {
          throw Error(ErrorCode::kRuleSemantics,
                      "predicate " + l.atom.predicate + " has arity " + std::to_string(it->second) +
                          " in the fact base but " + std::to_string(l.atom.args.size()) +
                          " in a rule");
        }
      }
      if (base_.declared(r.head.predicate)) {
        throw Error(ErrorCode::kRuleSemantics,
                    "rule head " + r.head.predicate + " redefines a base predicate");
      }
    }
  }

  const std::set<Tuple>& total(const std::string& p) const {
    if (rules_.defines(p)) return out_.relations.at(p);
    return base_.relation(p);
  }

  void run_stratum(const std::vector<size_t>& rule_ids) {
    std::set<std::string> local;
    for (size_t id : rule_ids) local.insert(rules_.rules()[id].head.predicate);

    delta_.clear();
    std::map<std::string, std::set<Tuple>> fresh;
    for (size_t id : rule_ids) {
      const Rule& r = rules_.rules()[id];
      std::vector<PlanStep> plan;
      for (size_t li : r.plan) plan.push_back({li});
      fire(id, plan, fresh);
    }
    commit(fresh);

    while (!delta_.empty()) {
      fresh.clear();
      for (size_t id : rule_ids) {
        const Rule& r = rules_.rules()[id];
        // One pass per recursive body atom: that atom reads the delta,
        // earlier recursive atoms read the old tuples, later ones the total.
        for (size_t pi = 0; pi < r.plan.size(); ++pi) {
          const Literal& l = r.body[r.plan[pi]];
          if (l.negated || l.builtin || !local.count(l.atom.predicate)) continue;
          if (!delta_.count(l.atom.predicate)) continue;
          std::vector<PlanStep> plan;
          for (size_t pj = 0; pj < r.plan.size(); ++pj) {
            const Literal& lj = r.body[r.plan[pj]];
            bool recursive = !lj.negated && !lj.builtin && local.count(lj.atom.predicate);
            plan.push_back({r.plan[pj], pj == pi, recursive && pj < pi});
          }
          fire(id, plan, fresh);
        }
      }
      commit(fresh);
    }
  }

  void commit(std::map<std::string, std::set<Tuple>>& fresh) {
    delta_.clear();
    for (auto& [p, tuples] : fresh) {
      if (tuples.empty()) continue;
      auto& rel = out_.relations[p];
      for (const auto& t : tuples) rel.insert(t);
      delta_[p] = std::move(tuples);
    }
  }

  void burn() {
    if (fuel_ == 0) {
      throw Error(ErrorCode::kFuelExhausted, "rule evaluation exceeded its step budget");
    }
    --fuel_;
  }

  void fire(size_t rule_id, const std::vector<PlanStep>& plan,
            std::map<std::string, std::set<Tuple>>& fresh) {
    Binding binding;
    join(rule_id, plan, 0, binding, fresh);
  }

  static bool unify(const Atom& a, const Tuple& t, Binding& b, std::vector<std::string>& bound_here) {
    for (size_t i = 0; i < a.args.size(); ++i) {
      if (auto* v = std::get_if<Variable>(&a.args[i])) {
        if (v->name == "_") continue;
        auto it = b.find(v->name);
        if (it == b.end()) {
          b.emplace(v->name, t[i]);
          bound_here.push_back(v->name);
        } else if (it->second != t[i]) {
          return false;
        }
      } else if (std::get<Value>(a.args[i]) != t[i]) {
        return false;
      }
    }
    return true;
  }

  // Leading ground arguments, usable as a range key in the ordered relation.
  static Tuple bound_prefix(const Atom& a, const Binding& b) {
    Tuple prefix;
    for (const auto& arg : a.args) {
      if (auto* v = std::get_if<Variable>(&arg)) {
        auto it = b.find(v->name);
        if (v->name == "_" || it == b.end()) break;
        prefix.push_back(it->second);
      } else {
        prefix.push_back(std::get<Value>(arg));
      }
    }
    return prefix;
  }

  template <class Visit>
  void scan(const std::set<Tuple>& rel, const Tuple& prefix, Visit&& visit) {
    for (auto it = rel.lower_bound(prefix); it != rel.end(); ++it) {
      if (!std::equal(prefix.begin(), prefix.end(), it->begin())) break;
      burn();
      if (!visit(*it)) return;
    }
  }

  bool exists_match(const Atom& a, const std::set<Tuple>& rel, const Binding& b) {
    bool found = false;
    Binding scratch = b;
    scan(rel, bound_prefix(a, b), [&](const Tuple& t) {
      std::vector<std::string> added;
      if (unify(a, t, scratch, added)) found = true;
      for (const auto& n : added) scratch.erase(n);
      return !found;
    });
    return found;
  }

  void join(size_t rule_id, const std::vector<PlanStep>& plan, size_t step, Binding& b,
            std::map<std::string, std::set<Tuple>>& fresh) {
    const Rule& r = rules_.rules()[rule_id];
    if (step == plan.size()) {
      emit(rule_id, b, fresh);
      return;
    }
    const Literal& l = r.body[plan[step].literal];
    if (l.builtin) {
      std::vector<std::optional<Value>> args;
      for (const auto& t : l.atom.args) {
        if (auto* v = std::get_if<Variable>(&t)) {
          auto it = b.find(v->name);
          args.push_back(it == b.end() ? std::nullopt : std::optional<Value>(it->second));
        } else {
          args.push_back(std::get<Value>(t));
        }
      }
      burn();
      bool ok = eval_builtin(l.atom.predicate, args);
      if (l.negated) ok = !ok;
      if (!ok) return;
      std::vector<std::string> added;
      for (size_t i = 0; i < args.size(); ++i) {
        if (auto* v = std::get_if<Variable>(&l.atom.args[i]); v && !b.count(v->name)) {
          b.emplace(v->name, *args[i]);
          added.push_back(v->name);
        }
      }
      join(rule_id, plan, step + 1, b, fresh);
      for (const auto& n : added) b.erase(n);
      return;
    }
    if (l.negated) {
      if (!exists_match(l.atom, total(l.atom.predicate), b)) join(rule_id, plan, step + 1, b, fresh);
      return;
    }
    const std::set<Tuple>* source = &total(l.atom.predicate);
    const std::set<Tuple>* skip = nullptr;
    if (plan[step].delta) {
      auto it = delta_.find(l.atom.predicate);
      source = it == delta_.end() ? &kEmpty : &it->second;
    } else if (plan[step].old) {
      auto it = delta_.find(l.atom.predicate);
      if (it != delta_.end()) skip = &it->second;
    }
    scan(*source, bound_prefix(l.atom, b), [&](const Tuple& t) {
      if (skip && skip->count(t)) return true;
      std::vector<std::string> added;
      if (unify(l.atom, t, b, added)) join(rule_id, plan, step + 1, b, fresh);
      for (const auto& n : added) b.erase(n);
      return true;
    });
  }

  static Value ground(const Term& t, const Binding& b) {
    if (auto* v = std::get_if<Variable>(&t)) return b.at(v->name);
    return std::get<Value>(t);
  }

  void emit(size_t rule_id, const Binding& b, std::map<std::string, std::set<Tuple>>& fresh) {
    const Rule& r = rules_.rules()[rule_id];
    Tuple head;
    head.reserve(r.head.args.size());
    for (const auto& t : r.head.args) head.push_back(ground(t, b));
    const auto& known = out_.relations[r.head.predicate];
    if (known.count(head)) return;
    auto& bucket = fresh[r.head.predicate];
    if (!bucket.insert(head).second) return;

    Derivation d;
    d.rule = rule_id;
    for (const auto& l : r.body) {
      Literal g = l;
      for (auto& t : g.atom.args) {
        if (auto* v = std::get_if<Variable>(&t); v && v->name != "_") t = b.at(v->name);
      }
      d.trace.push_back(render(g));
    }
    out_.provenance.emplace(std::make_pair(r.head.predicate, std::move(head)), std::move(d));
  }

  const RuleSet& rules_;
  const Database& base_;
  std::uint64_t fuel_;
  DerivedFacts out_;
  std::map<std::string, std::set<Tuple>> delta_;
};

}  // namespace

const std::vector<BuiltinSpec>& builtin_registry() { return kBuiltins; }

const BuiltinSpec* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

bool eval_builtin(std::string_view name, std::vector<std::optional<Value>>& args) {
  const BuiltinSpec* spec = find_builtin(name);
  if (!spec || spec->arity != args.size()) {
    throw Error(ErrorCode::kRuleSemantics, "unknown builtin " + std::string(name));
  }
  for (size_t i = 0; i < spec->inputs; ++i) {
    if (!args[i]) type_error(name, "argument " + std::to_string(i + 1) + " is not bound");
  }
  const Value& a = *args[0];
  const Value& b = *args[1];
  if (name == "string_contains") {
    return as_string(name, a).find(as_string(name, b)) != std::string::npos;
  }
  if (name == "starts_with") {
    const std::string& s = as_string(name, a);
    const std::string& p = as_string(name, b);
    return s.compare(0, p.size(), p) == 0;
  }
  if (name == "regex_match") {
    const std::string& s = as_string(name, a);
    return std::regex_search(s, compiled(as_string(name, b)));
  }
  if (name == "date_before") return as_date(name, a) < as_date(name, b);
  if (name == "days_between") {
    Value days{static_cast<std::int64_t>(ethoscan::days_between(as_date(name, a), as_date(name, b)))};
    if (!args[2]) {
      args[2] = days;
      return true;
    }
    return *args[2] == days;
  }
  if (name == "lt") return compare(name, a, b) < 0;
  if (name == "gt") return compare(name, a, b) > 0;
  if (name == "eq") return a == b;
  throw Error(ErrorCode::kInternal, "builtin without implementation: " + std::string(name));
}

void Database::declare(const std::string& predicate, size_t arity) {
  auto [it, inserted] = arities_.emplace(predicate, arity);
  if (!inserted && it->second != arity) {
    throw Error(ErrorCode::kRuleSemantics, "fact predicate " + predicate + " declared with arity " +
                                               std::to_string(arity) + " and " +
                                               std::to_string(it->second));
  }
  relations_[predicate];
}

void Database::add(const std::string& predicate, Tuple tuple) {
  declare(predicate, tuple.size());
  relations_[predicate].insert(std::move(tuple));
}

const std::set<Tuple>& Database::relation(const std::string& predicate) const {
  auto it = relations_.find(predicate);
  return it == relations_.end() ? kEmpty : it->second;
}

bool Database::contains(const std::string& predicate, const Tuple& t) const {
  return relation(predicate).count(t) != 0;
}

size_t Database::size() const {
  size_t n = 0;
  for (const auto& [_, rel] : relations_) n += rel.size();
  return n;
}

const std::set<Tuple>& DerivedFacts::relation(const std::string& predicate) const {
  auto it = relations.find(predicate);
  return it == relations.end() ? kEmpty : it->second;
}

size_t DerivedFacts::size() const {
  size_t n = 0;
  for (const auto& [_, rel] : relations) n += rel.size();
  return n;
}

DerivedFacts evaluate(const RuleSet& rules, const Database& base, EvalOptions options) {
  return Evaluator(rules, base, options).run();
}

DerivedFacts evaluate(const RuleSet& rules, const FactStore& store, EvalOptions options) {
  Database db = base_facts(store);
  return evaluate(rules, db, options);
}

bool holds(const Literal& ground, const Database& base, const DerivedFacts& derived) {
  if (ground.builtin) {
    std::vector<std::optional<Value>> args;
    for (const auto& t : ground.atom.args) {
      auto* v = std::get_if<Value>(&t);
      if (!v) throw Error(ErrorCode::kRuleSemantics, "literal is not ground: " + render(ground));
      args.emplace_back(*v);
    }
    bool ok = eval_builtin(ground.atom.predicate, args);
    return ground.negated ? !ok : ok;
  }
  const std::set<Tuple>& rel = derived.relations.count(ground.atom.predicate)
                                   ? derived.relation(ground.atom.predicate)
                                   : base.relation(ground.atom.predicate);
  bool found = false;
  for (const auto& t : rel) {
    if (t.size() != ground.atom.args.size()) continue;
    bool match = true;
    for (size_t i = 0; i < t.size() && match; ++i) {
      if (auto* v = std::get_if<Value>(&ground.atom.args[i])) match = *v == t[i];
      else if (std::get<Variable>(ground.atom.args[i]).name != "_") {
        throw Error(ErrorCode::kRuleSemantics, "literal is not ground: " + render(ground));
      }
    }
    if (match) {
      found = true;
      break;
    }
  }
  return ground.negated ? !found : found;
}

}  // namespace ethoscan::rules
