#include "naive_datalog.hpp"

#include <algorithm>
#include <stdexcept>

namespace oracle {

using ethoscan::rules::Atom;
using ethoscan::rules::Database;
using ethoscan::rules::Literal;
using ethoscan::rules::Rule;
using ethoscan::rules::Term;
using ethoscan::rules::Tuple;
using ethoscan::rules::Value;
using ethoscan::rules::Variable;

namespace {

using Binding = std::map<std::string, Value>;

std::map<std::string, int> strata_of(const std::vector<Rule>& rules) {
  std::map<std::string, int> level;
  for (const auto& r : rules) level[r.head.predicate] = 0;
  std::set<std::string> derived;
  for (const auto& r : rules) derived.insert(r.head.predicate);
  for (size_t round = 0; round <= derived.size() + 1; ++round) {
    bool changed = false;
    for (const auto& r : rules) {
      for (const auto& l : r.body) {
        if (l.builtin || !derived.count(l.atom.predicate)) continue;
        int need = level[l.atom.predicate] + (l.negated ? 1 : 0);
        if (level[r.head.predicate] < need) {
          level[r.head.predicate] = need;
          changed = true;
        }
      }
    }
    if (!changed) return level;
  }
  throw std::logic_error("oracle: program is not stratified");
}

bool match(const Atom& a, const Tuple& t, Binding& b) {
  if (a.args.size() != t.size()) return false;
  for (size_t i = 0; i < t.size(); ++i) {
    if (const auto* v = std::get_if<Variable>(&a.args[i])) {
      if (v->name == "_") continue;
      auto it = b.find(v->name);
      if (it == b.end()) {
        b[v->name] = t[i];
      } else if (it->second != t[i]) {
        return false;
      }
    } else if (std::get<Value>(a.args[i]) != t[i]) {
      return false;
    }
  }
  return true;
}

Value resolve(const Term& term, const Binding& b) {
  if (const auto* v = std::get_if<Variable>(&term)) return b.at(v->name);
  return std::get<Value>(term);
}

Tuple ground(const Atom& a, const Binding& b) {
  Tuple t;
  for (const auto& term : a.args) t.push_back(resolve(term, b));
  return t;
}

bool builtin(const Literal& l, const Binding& b) {
  const auto& p = l.atom.predicate;
  Value x = resolve(l.atom.args.at(0), b);
  Value y = resolve(l.atom.args.at(1), b);
  if (p == "eq") return x == y;
  auto ix = std::get<std::int64_t>(x);
  auto iy = std::get<std::int64_t>(y);
  if (p == "lt") return ix < iy;
  if (p == "gt") return ix > iy;
  throw std::logic_error("oracle: unsupported builtin " + p);
}

const std::set<Tuple>& rel(const Relations& facts, const std::string& p) {
  static const std::set<Tuple> kEmpty;
  auto it = facts.find(p);
  return it == facts.end() ? kEmpty : it->second;
}

void solve(const Rule& r, size_t i, Binding& b, const Relations& facts, std::set<Tuple>& out) {
  if (i == r.body.size()) {
    for (const auto& l : r.body) {
      if (l.builtin) {
        if (!builtin(l, b) == !l.negated) return;
      } else if (l.negated) {
        if (rel(facts, l.atom.predicate).count(ground(l.atom, b))) return;
      }
    }
    out.insert(ground(r.head, b));
    return;
  }
  const Literal& l = r.body[i];
  if (l.builtin || l.negated) {
    solve(r, i + 1, b, facts, out);
    return;
  }
  for (const auto& t : rel(facts, l.atom.predicate)) {
    Binding next = b;
    if (match(l.atom, t, next)) solve(r, i + 1, next, facts, out);
  }
}

}  // namespace

Relations naive_evaluate(const std::vector<Rule>& rules, const Database& base) {
  Relations facts;
  for (const auto& [p, _] : base.arities()) facts[p] = base.relation(p);
  auto level = strata_of(rules);
  int top = 0;
  for (const auto& [_, l] : level) top = std::max(top, l);
  Relations derived;
  for (int s = 0; s <= top; ++s) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : rules) {
        if (level[r.head.predicate] != s) continue;
        std::set<Tuple> out;
        Binding b;
        solve(r, 0, b, facts, out);
        for (const auto& t : out) {
          if (facts[r.head.predicate].insert(t).second) {
            derived[r.head.predicate].insert(t);
            changed = true;
          }
        }
      }
    }
  }
  return derived;
}

Relations normalized(const std::map<std::string, std::set<Tuple>>& r) {
  Relations out;
  for (const auto& [p, s] : r) {
    if (!s.empty()) out[p] = s;
  }
  return out;
}

RandomProgram random_program(std::mt19937_64& rng, size_t max_rules, size_t max_facts) {
  auto pick = [&](size_t n) { return static_cast<size_t>(rng() % n); };
  const std::vector<std::pair<std::string, size_t>> base_preds = {
      {"b0", 1}, {"b1", 2}, {"b2", 2}, {"b3", 1}};
  struct Derived {
    std::string name;
    size_t arity;
    int level;
    bool defined = false;
  };
  std::vector<Derived> derived;
  for (int i = 0; i < 4; ++i) {
    derived.push_back({"d" + std::to_string(i), 1 + pick(2), static_cast<int>(pick(3))});
  }

  RandomProgram p;
  for (const auto& [name, arity] : base_preds) p.base.declare(name, arity);
  size_t nfacts = pick(max_facts + 1);
  for (size_t i = 0; i < nfacts; ++i) {
    const auto& [name, arity] = base_preds[pick(base_preds.size())];
    Tuple t;
    for (size_t a = 0; a < arity; ++a) t.emplace_back(static_cast<std::int64_t>(pick(5)));
    p.base.add(name, t);
  }
  p.facts = p.base.size();

  const std::vector<std::string> vars = {"X", "Y", "Z", "W"};
  std::set<std::string> seen;
  size_t nrules = 1 + pick(max_rules);
  for (size_t attempt = 0; p.rules.size() < nrules && attempt < nrules * 20; ++attempt) {
    Derived& head = derived[pick(derived.size())];
    struct Choice {
      std::string name;
      size_t arity;
    };
    std::vector<Choice> positive, negative;
    for (const auto& [name, arity] : base_preds) {
      positive.push_back({name, arity});
      negative.push_back({name, arity});
    }
    for (const auto& d : derived) {
      if (!d.defined && d.name != head.name) continue;
      if (d.level <= head.level) positive.push_back({d.name, d.arity});
      if (d.defined && d.level < head.level) negative.push_back({d.name, d.arity});
    }

    Rule r;
    std::vector<std::string> bound;
    size_t npos = 1 + pick(3);
    for (size_t i = 0; i < npos; ++i) {
      // The first atom is never the head itself, so each rule has a base case.
      Choice c = positive[pick(i == 0 ? base_preds.size() : positive.size())];
      Literal l;
      l.atom.predicate = c.name;
      for (size_t a = 0; a < c.arity; ++a) {
        if (pick(6) == 0) {
          l.atom.args.emplace_back(Value{static_cast<std::int64_t>(pick(5))});
        } else {
          std::string v = vars[pick(vars.size())];
          l.atom.args.emplace_back(Variable{v});
          if (std::find(bound.begin(), bound.end(), v) == bound.end()) bound.push_back(v);
        }
      }
      r.body.push_back(std::move(l));
    }
    if (bound.empty()) continue;
    auto bound_term = [&]() -> Term { return Variable{bound[pick(bound.size())]}; };
    if (pick(2) == 0) {
      Choice c = negative[pick(negative.size())];
      Literal l;
      l.negated = true;
      l.atom.predicate = c.name;
      for (size_t a = 0; a < c.arity; ++a) {
        if (pick(4) == 0) {
          l.atom.args.emplace_back(Value{static_cast<std::int64_t>(pick(5))});
        } else {
          l.atom.args.push_back(bound_term());
        }
      }
      r.body.push_back(std::move(l));
    }
    if (pick(3) == 0) {
      static const char* kOps[] = {"lt", "gt", "eq"};
      Literal l;
      l.builtin = true;
      l.negated = pick(4) == 0;
      l.atom.predicate = kOps[pick(3)];
      l.atom.args.push_back(bound_term());
      if (pick(2) == 0) {
        l.atom.args.emplace_back(Value{static_cast<std::int64_t>(pick(5))});
      } else {
        l.atom.args.push_back(bound_term());
      }
      r.body.push_back(std::move(l));
    }
    r.head.predicate = head.name;
    for (size_t a = 0; a < head.arity; ++a) r.head.args.push_back(bound_term());

    std::string key = ethoscan::rules::render(r);
    if (!seen.insert(key).second) continue;
    head.defined = true;
    p.rules.push_back(std::move(r));
  }
  return p;
}

}  // namespace oracle
