#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ethoscan/fact_model.hpp"
#include "ethoscan/time.hpp"

// Horn rules with stratified negation-as-failure over ground facts.
//
//   head(X, Y) :- body(X, Z), other(Z, Y), not blocked(Y), gt(Y, 0).
//
// Variables start with an upper-case letter or `_` (a lone `_` is a fresh
// wildcard). Constants are quoted strings, integers, dates (YYYY-MM-DD) or
// bare lower-case identifiers (read as strings). `%` starts a comment.
namespace ethoscan::rules {

using Value = std::variant<std::int64_t, std::string, Date>;
using Tuple = std::vector<Value>;

std::string render(const Value& v);

struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, Value>;

struct Atom {
  std::string predicate;
  std::vector<Term> args;
};

struct Literal {
  Atom atom;
  bool negated = false;
  bool builtin = false;
};

struct SourceLocation {
  std::string source;
  int line = 0;
  int column = 0;
};

struct Rule {
  Atom head;
  std::vector<Literal> body;
  SourceLocation location;
  // Evaluation order over `body`: positive atoms in textual order, each
  // filter placed as soon as its inputs are bound.
  std::vector<size_t> plan;
};

std::string render(const Atom& a);
std::string render(const Literal& l);
std::string render(const Rule& r);

/// Validated rules plus their evaluation order.
class RuleSet {
 public:
  const std::vector<Rule>& rules() const { return rules_; }
  /// Rule indices grouped by stratum, lowest first.
  const std::vector<std::vector<size_t>>& strata() const { return strata_; }
  const std::map<std::string, size_t>& arities() const { return arities_; }
  bool defines(const std::string& predicate) const { return heads_.count(predicate) != 0; }
  const std::set<std::string>& derived_predicates() const { return heads_; }
  int stratum_of(const std::string& predicate) const;

  /// True when some rule body mentions an atom with this predicate and text.
  bool mentions(const std::string& predicate) const { return arities_.count(predicate) != 0; }

 private:
  friend RuleSet build_rule_set(std::vector<Rule> rules);
  std::vector<Rule> rules_;
  std::vector<std::vector<size_t>> strata_;
  std::map<std::string, size_t> arities_;
  std::set<std::string> heads_;
  std::map<std::string, int> stratum_;
};

/// Throws Error(kRuleParse) with line/column, Error(kRuleUnsafe),
/// Error(kRuleStratification) naming the cycle, or Error(kRuleSemantics).
RuleSet parse_rules(std::string_view text, std::string_view source_name = "<rules>");
RuleSet parse_rules(const std::vector<std::pair<std::string, std::string>>& sources);
/// Validates already-built rules (used by parse_rules and by tests that
/// generate programs).
RuleSet build_rule_set(std::vector<Rule> rules);

/// Parses a single ground body literal such as `not eq("a", "b")`.
Literal parse_literal(std::string_view text);

// --- builtins -------------------------------------------------------------

struct BuiltinSpec {
  std::string_view name;
  size_t arity;
  size_t inputs;  // leading arguments that must be bound; the rest are outputs
};

const BuiltinSpec* find_builtin(std::string_view name);
const std::vector<BuiltinSpec>& builtin_registry();

// --- facts ----------------------------------------------------------------

class Database {
 public:
  /// Declares a predicate with no facts yet. Throws on an arity clash.
  void declare(const std::string& predicate, size_t arity);
  void add(const std::string& predicate, Tuple tuple);

  bool declared(const std::string& predicate) const { return arities_.count(predicate) != 0; }
  const std::map<std::string, size_t>& arities() const { return arities_; }
  const std::set<Tuple>& relation(const std::string& predicate) const;
  bool contains(const std::string& predicate, const Tuple& t) const;
  size_t size() const;

  friend bool operator==(const Database&, const Database&) = default;

 private:
  std::map<std::string, size_t> arities_;
  std::map<std::string, std::set<Tuple>> relations_;
};

/// How a derived tuple was first obtained.
struct Derivation {
  size_t rule = 0;
  std::vector<std::string> trace;  // grounded body literals, textual order
};

struct DerivedFacts {
  std::map<std::string, std::set<Tuple>> relations;
  std::map<std::pair<std::string, Tuple>, Derivation> provenance;

  const std::set<Tuple>& relation(const std::string& predicate) const;
  size_t size() const;
};

struct EvalOptions {
  // Upper bound on tuple visits; tripping it means a runaway evaluation.
  std::uint64_t fuel = 200'000'000;
};

/// Semi-naive least fixpoint, stratum by stratum.
/// Throws Error(kRuleSemantics) for predicates that are neither base, derived
/// nor builtin, Error(kBuiltinType) and Error(kFuelExhausted).
DerivedFacts evaluate(const RuleSet& rules, const Database& base, EvalOptions options = {});
DerivedFacts evaluate(const RuleSet& rules, const FactStore& store, EvalOptions options = {});

/// Checks one ground literal against base and derived facts.
bool holds(const Literal& ground, const Database& base, const DerivedFacts& derived);

/// Evaluates a builtin on ground arguments; the outputs (days_between's third
/// argument) are written back into `args` when unbound on entry.
bool eval_builtin(std::string_view name, std::vector<std::optional<Value>>& args);

// --- export from the fact model --------------------------------------------

/// Base predicates exported from a FactStore:
///   repo(R) is_fork(R) parent(R,P) fork(R,F) contributor(R,U) file(R,Path)
///   file_count(R,N) license_file(R,Path) readme_file(R,Path)
///   changelog_file(R,Path) latest_release(R,Tag,Date) license_commit(R,Sha,Date)
///   pull_request_count(R,Sha,N) external_link(R,Url) issue(R,N,Owner)
///   pull_request(R,N) post(R,N,Index,Author)
/// Repositories are `owner/name` strings; pull requests also appear in issue/3.
Database base_facts(const FactStore& store);
void declare_base_predicates(Database& db);

}  // namespace ethoscan::rules
