#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <sstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/rules.hpp"

namespace ethoscan::rules {
namespace {

enum class Tok { kIdent, kVariable, kString, kInteger, kDate, kLParen, kRParen, kComma, kDot, kImplies, kEnd };

struct Token {
  Tok kind;
  std::string text;
  Value value;
  int line;
  int column;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string source) : src_(src), source_(std::move(source)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::kEnd, "", {}, line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

  [[noreturn]] void fail(int line, int col, const std::string& what) const {
    throw Error(ErrorCode::kRuleParse,
                source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }

 private:
  char peek(size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == '%' || c == '#') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    int line = line_, col = col_;
    char c = peek();
    auto simple = [&](Tok kind, size_t len) {
      std::string text(src_.substr(pos_, len));
      for (size_t i = 0; i < len; ++i) advance();
      return Token{kind, text, {}, line, col};
    };
    if (c == '(') return simple(Tok::kLParen, 1);
    if (c == ')') return simple(Tok::kRParen, 1);
    if (c == ',') return simple(Tok::kComma, 1);
    if (c == '.') return simple(Tok::kDot, 1);
    if (c == ':' && peek(1) == '-') return simple(Tok::kImplies, 2);
    if (c == '"') return string_literal(line, col);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number(line, col);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
        advance();
      }
      std::string word(src_.substr(start, pos_ - start));
      bool variable = std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_';
      return Token{variable ? Tok::kVariable : Tok::kIdent, word, {}, line, col};
    }
    fail(line, col, std::string("unexpected character '") + c + "'");
  }

  Token string_literal(int line, int col) {
    advance();
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n') fail(line, col, "unterminated string");
      char c = peek();
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail(line, col, "unterminated string");
        char e = peek();
        advance();
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default: fail(line_, col_ - 1, std::string("unknown escape '\\") + e + "'");
        }
      } else {
        value += c;
      }
    }
    return Token{Tok::kString, value, Value{value}, line, col};
  }

  Token number(int line, int col) {
    size_t start = pos_;
    if (peek() == '-') advance();
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    // YYYY-MM-DD
    if (pos_ - start == 4 && src_[start] != '-' && peek() == '-' &&
        std::isdigit(static_cast<unsigned char>(peek(1)))) {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-') advance();
      std::string text(src_.substr(start, pos_ - start));
      Date d;
      if (!try_parse_date(text, d)) fail(line, col, "malformed date '" + text + "'");
      return Token{Tok::kDate, text, Value{d}, line, col};
    }
    std::string text(src_.substr(start, pos_ - start));
    std::int64_t v = 0;
    try {
      v = std::stoll(text);
    } catch (const std::exception&) {
      fail(line, col, "integer out of range '" + text + "'");
    }
    return Token{Tok::kInteger, text, Value{v}, line, col};
  }

  std::string_view src_;
  std::string source_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, Lexer& lexer, std::string source)
      : toks_(std::move(tokens)), lexer_(lexer), source_(std::move(source)) {}

  std::vector<Rule> rules() {
    std::vector<Rule> out;
    while (cur().kind != Tok::kEnd) out.push_back(rule());
    return out;
  }

  Literal single_literal() {
    Literal l = literal();
    expect(Tok::kEnd, "end of input");
    return l;
  }

 private:
  const Token& cur() const { return toks_[i_]; }

  [[noreturn]] void fail(const std::string& what) const {
    lexer_.fail(cur().line, cur().column, what);
  }

  const Token& expect(Tok kind, const char* what) {
    if (cur().kind != kind) {
      fail(std::string("expected ") + what + (cur().kind == Tok::kEnd ? " before end of input"
                                                                       : ", found '" + cur().text + "'"));
    }
    return toks_[i_++];
  }

  Rule rule() {
    Rule r;
    r.location = {source_, cur().line, cur().column};
    if (cur().kind == Tok::kIdent && cur().text == "not") fail("negated rule head");
    r.head = atom();
    if (cur().kind == Tok::kImplies) {
      ++i_;
      r.body.push_back(literal());
      while (cur().kind == Tok::kComma) {
        ++i_;
        r.body.push_back(literal());
      }
    }
    expect(Tok::kDot, "'.'");
    return r;
  }

  Literal literal() {
    Literal l;
    if (cur().kind == Tok::kIdent && cur().text == "not" && toks_[i_ + 1].kind == Tok::kIdent) {
      l.negated = true;
      ++i_;
    }
    l.atom = atom();
    l.builtin = find_builtin(l.atom.predicate) != nullptr;
    return l;
  }

  Atom atom() {
    Atom a;
    a.predicate = expect(Tok::kIdent, "predicate name").text;
    expect(Tok::kLParen, "'('");
    if (cur().kind != Tok::kRParen) {
      a.args.push_back(term());
      while (cur().kind == Tok::kComma) {
        ++i_;
        a.args.push_back(term());
      }
    }
    expect(Tok::kRParen, "')'");
    return a;
  }

  Term term() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::kVariable: ++i_; return Variable{t.text};
      case Tok::kIdent: ++i_; return Value{t.text};
      case Tok::kString:
      case Tok::kInteger:
      case Tok::kDate: ++i_; return t.value;
      default: fail("expected a term, found '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  Lexer& lexer_;
  std::string source_;
  size_t i_ = 0;
};

std::string where(const Rule& r) {
  return r.location.source + ":" + std::to_string(r.location.line) + ":" +
         std::to_string(r.location.column);
}

bool is_wildcard(const Term& t) {
  auto* v = std::get_if<Variable>(&t);
  return v && v->name == "_";
}

// Orders the body for evaluation and enforces range restriction.
void plan_rule(Rule& r) {
  std::set<std::string> bound;
  std::vector<bool> placed(r.body.size(), false);
  auto vars_of = [](const Atom& a, size_t from, size_t to) {
    std::vector<std::string> vs;
    for (size_t i = from; i < std::min(to, a.args.size()); ++i) {
      if (auto* v = std::get_if<Variable>(&a.args[i]); v && v->name != "_") vs.push_back(v->name);
    }
    return vs;
  };
  auto ready = [&](const Literal& l) {
    size_t inputs = l.atom.args.size();
    if (l.builtin && !l.negated) inputs = find_builtin(l.atom.predicate)->inputs;
    for (const auto& v : vars_of(l.atom, 0, inputs)) {
      if (!bound.count(v)) return false;
    }
    return true;
  };
  auto place_filters = [&] {
    bool progress = true;
    while (progress) {
      progress = false;
      for (size_t i = 0; i < r.body.size(); ++i) {
        const Literal& l = r.body[i];
        if (placed[i] || (!l.negated && !l.builtin)) continue;
        if (ready(l)) {
          placed[i] = true;
          r.plan.push_back(i);
          if (l.builtin && !l.negated) {
            for (const auto& v : vars_of(l.atom, 0, l.atom.args.size())) bound.insert(v);
          }
          progress = true;
        }
      }
    }
  };

  for (size_t i = 0; i < r.body.size(); ++i) {
    const Literal& l = r.body[i];
    if (l.builtin) {
      for (const auto& t : l.atom.args) {
        if (is_wildcard(t)) {
          throw Error(ErrorCode::kRuleUnsafe,
                      where(r) + ": wildcard '_' is not allowed in builtin " + render(l));
        }
      }
    }
  }
  place_filters();
  for (size_t i = 0; i < r.body.size(); ++i) {
    const Literal& l = r.body[i];
    if (l.negated || l.builtin) continue;
    placed[i] = true;
    r.plan.push_back(i);
    for (const auto& v : vars_of(l.atom, 0, l.atom.args.size())) bound.insert(v);
    place_filters();
  }
  for (size_t i = 0; i < r.body.size(); ++i) {
    if (!placed[i]) {
      std::string missing;
      const Literal& l = r.body[i];
      for (const auto& v : vars_of(l.atom, 0, l.atom.args.size())) {
        if (!bound.count(v)) {
          missing = v;
          break;
        }
      }
      throw Error(ErrorCode::kRuleUnsafe, where(r) + ": variable " + missing + " in '" + render(l) +
                                              "' does not occur in a positive body atom");
    }
  }
  for (const auto& t : r.head.args) {
    if (is_wildcard(t)) throw Error(ErrorCode::kRuleUnsafe, where(r) + ": wildcard in rule head");
    if (auto* v = std::get_if<Variable>(&t); v && !bound.count(v->name)) {
      throw Error(ErrorCode::kRuleUnsafe, where(r) + ": head variable " + v->name +
                                              " does not occur in a positive body atom");
    }
  }
}

// Variables renamed by first occurrence, so alpha-equivalent rules collide.
std::string canonical(const Rule& r) {
  std::map<std::string, std::string> names;
  auto term_text = [&](const Term& t) -> std::string {
    if (auto* v = std::get_if<Variable>(&t)) {
      if (v->name == "_") return "_";
      auto [it, inserted] = names.emplace(v->name, "V" + std::to_string(names.size()));
      return it->second;
    }
    return render(std::get<Value>(t));
  };
  auto atom_text = [&](const Atom& a) {
    std::string s = a.predicate + "(";
    for (size_t i = 0; i < a.args.size(); ++i) s += (i ? "," : "") + term_text(a.args[i]);
    return s + ")";
  };
  std::string s = atom_text(r.head) + ":-";
  for (const auto& l : r.body) s += (l.negated ? "!" : "") + atom_text(l.atom) + ";";
  return s;
}

struct Edge {
  std::string to;
  bool negative;
};

}  // namespace

RuleSet build_rule_set(std::vector<Rule> rules) {
  RuleSet rs;
  std::set<std::string> seen;
  auto note_arity = [&](const Rule& r, const Atom& a) {
    auto [it, inserted] = rs.arities_.emplace(a.predicate, a.args.size());
    if (!inserted && it->second != a.args.size()) {
      throw Error(ErrorCode::kRuleSemantics,
                  where(r) + ": predicate " + a.predicate + " used with arity " +
                      std::to_string(a.args.size()) + " but elsewhere with arity " +
                      std::to_string(it->second));
    }
  };
  for (auto& r : rules) {
    if (find_builtin(r.head.predicate)) {
      throw Error(ErrorCode::kRuleSemantics,
                  where(r) + ": builtin " + r.head.predicate + " cannot be a rule head");
    }
    note_arity(r, r.head);
    for (const auto& l : r.body) {
      if (l.builtin) {
        const BuiltinSpec* spec = find_builtin(l.atom.predicate);
        if (spec->arity != l.atom.args.size()) {
          throw Error(ErrorCode::kRuleSemantics,
                      where(r) + ": builtin " + l.atom.predicate + " takes " +
                          std::to_string(spec->arity) + " arguments");
        }
        if (l.negated && spec->inputs != spec->arity) {
          throw Error(ErrorCode::kRuleUnsafe,
                      where(r) + ": builtin " + l.atom.predicate + " binds a variable and cannot be negated");
        }
      } else {
        note_arity(r, l.atom);
      }
    }
    r.plan.clear();
    plan_rule(r);
    if (!seen.insert(canonical(r)).second) {
      throw Error(ErrorCode::kRuleSemantics, where(r) + ": duplicate rule '" + render(r) + "'");
    }
    rs.heads_.insert(r.head.predicate);
  }

  // Dependency graph among derived predicates: body -> head.
  std::map<std::string, std::vector<Edge>> graph;
  for (const auto& p : rs.heads_) graph[p];
  for (const auto& r : rules) {
    for (const auto& l : r.body) {
      if (l.builtin || !rs.heads_.count(l.atom.predicate)) continue;
      graph[l.atom.predicate].push_back({r.head.predicate, l.negated});
    }
  }

  // Tarjan SCC.
  std::map<std::string, int> index, low, comp;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  int counter = 0, ncomp = 0;
  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& e : graph[v]) {
      if (!index.count(e.to)) {
        strongconnect(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack.count(e.to)) {
        low[v] = std::min(low[v], index[e.to]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (const auto& [p, _] : graph) {
    if (!index.count(p)) strongconnect(p);
  }

  for (const auto& [from, edges] : graph) {
    for (const auto& e : edges) {
      if (!e.negative || comp[from] != comp[e.to]) continue;
      // Recover a witness path e.to ~> from inside the component.
      std::map<std::string, std::string> prev;
      std::vector<std::string> queue{e.to};
      prev[e.to] = e.to;
      for (size_t qi = 0; qi < queue.size() && !prev.count(from); ++qi) {
        for (const auto& next : graph[queue[qi]]) {
          if (comp[next.to] == comp[from] && !prev.count(next.to)) {
            prev[next.to] = queue[qi];
            queue.push_back(next.to);
          }
        }
      }
      std::vector<std::string> path;
      for (std::string at = from; at != e.to; at = prev[at]) path.push_back(at);
      path.push_back(e.to);
      std::reverse(path.begin(), path.end());
      std::string cycle = from + " -> not " + e.to;
      for (size_t i = 1; i < path.size(); ++i) cycle += " -> " + path[i];
      if (from == e.to) cycle = from + " -> not " + from;
      throw Error(ErrorCode::kRuleStratification,
                  "negation cycle, no stratification exists: " + cycle);
    }
  }

  // Tarjan emits components in reverse topological order.
  std::vector<int> comp_stratum(ncomp, 0);
  for (int c = ncomp - 1; c >= 0; --c) {
    for (const auto& [from, edges] : graph) {
      if (comp[from] != c) continue;
      for (const auto& e : edges) {
        if (comp[e.to] == c) continue;
        comp_stratum[comp[e.to]] =
            std::max(comp_stratum[comp[e.to]], comp_stratum[c] + (e.negative ? 1 : 0));
      }
    }
  }
  int max_stratum = 0;
  for (const auto& p : rs.heads_) {
    rs.stratum_[p] = comp_stratum[comp[p]];
    max_stratum = std::max(max_stratum, rs.stratum_[p]);
  }
  rs.rules_ = std::move(rules);
  if (!rs.rules_.empty()) rs.strata_.assign(static_cast<size_t>(max_stratum) + 1, {});
  for (size_t i = 0; i < rs.rules_.size(); ++i) {
    rs.strata_[static_cast<size_t>(rs.stratum_[rs.rules_[i].head.predicate])].push_back(i);
  }
  std::erase_if(rs.strata_, [](const auto& s) { return s.empty(); });
  return rs;
}

int RuleSet::stratum_of(const std::string& predicate) const {
  auto it = stratum_.find(predicate);
  return it == stratum_.end() ? -1 : it->second;
}

RuleSet parse_rules(std::string_view text, std::string_view source_name) {
  return parse_rules({{std::string(source_name), std::string(text)}});
}

RuleSet parse_rules(const std::vector<std::pair<std::string, std::string>>& sources) {
  std::vector<Rule> all;
  for (const auto& [name, text] : sources) {
    Lexer lexer(text, name);
    Parser parser(lexer.run(), lexer, name);
    for (auto& r : parser.rules()) all.push_back(std::move(r));
  }
  return build_rule_set(std::move(all));
}

Literal parse_literal(std::string_view text) {
  Lexer lexer(text, "<literal>");
  Parser parser(lexer.run(), lexer, "<literal>");
  return parser.single_literal();
}

std::string render(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* d = std::get_if<Date>(&v)) return format_date(*d);
  std::string out = "\"";
  for (char c : std::get<std::string>(v)) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string render(const Atom& a) {
  std::string s = a.predicate + "(";
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    if (auto* v = std::get_if<Variable>(&a.args[i])) {
      s += v->name;
    } else {
      s += render(std::get<Value>(a.args[i]));
    }
  }
  return s + ")";
}

std::string render(const Literal& l) { return (l.negated ? "not " : "") + render(l.atom); }

std::string render(const Rule& r) {
  std::string s = render(r.head);
  if (!r.body.empty()) {
    s += " :- ";
    for (size_t i = 0; i < r.body.size(); ++i) s += (i ? ", " : "") + render(r.body[i]);
  }
  return s + ".";
}

}  // namespace ethoscan::rules
