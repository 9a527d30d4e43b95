#include "chrsem/syntax.hpp"

#include <cctype>
#include <set>

namespace chrsem {

namespace {

enum class Tok { Var, Ident, LParen, RParen, Comma, Dot, Bar, At, Eq, Simp, Prop, Backslash, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t{Tok::End, "", line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      auto word = [&] {
        std::size_t b = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        return src_.substr(b, pos_ - b);
      };
      if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Var;
        t.text = word();
      } else if (std::islower(static_cast<unsigned char>(c)) ||
                 std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Ident;
        t.text = word();
      } else if (src_.compare(pos_, 3, "<=>") == 0) {
        t.kind = Tok::Simp;
        t.text = "<=>";
        advance(3);
      } else if (src_.compare(pos_, 3, "==>") == 0) {
        t.kind = Tok::Prop;
        t.text = "==>";
        advance(3);
      } else {
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          case '.': t.kind = Tok::Dot; break;
          case '|': t.kind = Tok::Bar; break;
          case '@': t.kind = Tok::At; break;
          case '=': t.kind = Tok::Eq; break;
          case '\\': t.kind = Tok::Backslash; break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
        t.text = std::string(1, c);
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }
  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Variable naming used while parsing: either a rule-local table or a shared
// goal scope.
struct VarTable {
  GoalScope* scope = nullptr;
  std::map<std::string, VarId> local;
  VarId next = 1;
  std::vector<VarId> order;
  std::vector<std::string> order_names;

  Term get(const std::string& name) {
    VarId id;
    if (scope) {
      id = name == "_" ? scope->fresh() : scope->lookup(name);
    } else if (name == "_") {
      id = next++;
    } else {
      auto [it, fresh] = local.emplace(name, next);
      if (fresh) ++next;
      id = it->second;
    }
    if (std::find(order.begin(), order.end(), id) == order.end()) {
      order.push_back(id);
      order_names.push_back(name);
    }
    return Term::var(id, Symbol(name));
  }
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(Lexer(text).run()) {}

  Program program() {
    Program p;
    std::set<std::string> names;
    while (peek().kind != Tok::End) {
      Rule r = rule(p.rules.size() + 1);
      if (!names.insert(r.name).second)
        throw ParseError("duplicate rule name '" + r.name + "'", last_line_, last_col_);
      p.rules.push_back(std::move(r));
    }
    return p;
  }

  std::vector<Atom> items(VarTable& vars, bool allow_trailing_dot) {
    std::vector<Atom> out;
    if (peek().kind == Tok::End) return out;
    for (;;) {
      Atom a = item(vars);
      if (!(a.pred == Symbol("true") && a.args.empty())) out.push_back(std::move(a));
      if (peek().kind != Tok::Comma) break;
      next();
    }
    if (allow_trailing_dot && peek().kind == Tok::Dot) next();
    expect(Tok::End, "end of input");
    return out;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    last_line_ = t.line;
    last_col_ = t.column;
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      fail(std::string("expected ") + what + ", found " + got);
    }
    return next();
  }

  Term term(VarTable& vars) {
    if (peek().kind == Tok::Var) return vars.get(next().text);
    const Token& id = expect(Tok::Ident, "term");
    Symbol f(id.text);
    std::vector<Term> args;
    if (peek().kind == Tok::LParen) {
      next();
      for (;;) {
        args.push_back(term(vars));
        if (peek().kind != Tok::Comma) break;
        next();
      }
      expect(Tok::RParen, "')'");
    }
    return Term::compound(f, std::move(args));
  }

  // atom | builtin
  Atom item(VarTable& vars) {
    int line = peek().line, col = peek().column;
    Term t = term(vars);
    if (peek().kind == Tok::Eq) {
      next();
      Term r = term(vars);
      return Atom::equation(t, r);
    }
    if (t.is_var()) throw ParseError("a variable is not a constraint", line, col);
    if (t.functor() == Symbol("false") && t.arity() == 0) return Atom::falsum();
    std::vector<Term> args(t.args().begin(), t.args().end());
    return Atom::user(t.functor(), std::move(args));
  }

  Rule rule(std::size_t position) {
    Rule r;
    VarTable vars;
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::At) {
      r.name = next().text;
      next();
    } else {
      r.name = "r" + std::to_string(position);
    }
    for (;;) {
      int line = peek().line, col = peek().column;
      Atom a = item(vars);
      if (a.is_builtin() || (a.pred == Symbol("true") && a.args.empty()))
        throw ParseError("built-in constraint in rule head", line, col);
      r.head.push_back(std::move(a));
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      if (peek().kind == Tok::Backslash)
        fail(
            "simpagation rules are not supported; write them as a propagation rule plus a "
            "simplification rule");
      break;
    }
    if (peek().kind == Tok::Simp) {
      r.kind = RuleKind::Simplification;
    } else if (peek().kind == Tok::Prop) {
      r.kind = RuleKind::Propagation;
    } else {
      fail("expected '<=>' or '==>'");
    }
    next();
    if (peek().kind == Tok::Dot) fail("empty rule body, write 'true'");
    std::vector<std::pair<Atom, std::pair<int, int>>> first;
    for (;;) {
      auto pos = std::make_pair(peek().line, peek().column);
      first.emplace_back(item(vars), pos);
      if (peek().kind != Tok::Comma) break;
      next();
    }
    std::vector<std::pair<Atom, std::pair<int, int>>> body;
    if (peek().kind == Tok::Bar) {
      next();
      for (auto& [a, pos] : first) {
        if (a.pred == Symbol("true") && a.args.empty()) continue;
        if (a.is_false()) {
          r.guard.falsum = true;
        } else if (a.is_equation()) {
          r.guard.eqs.push_back({a.args[0], a.args[1]});
        } else {
          throw ParseError("user constraint in guard", pos.first, pos.second);
        }
      }
      if (peek().kind == Tok::Dot) fail("empty rule body, write 'true'");
      for (;;) {
        auto pos = std::make_pair(peek().line, peek().column);
        body.emplace_back(item(vars), pos);
        if (peek().kind != Tok::Comma) break;
        next();
      }
    } else {
      body = std::move(first);
    }
    for (auto& [a, pos] : body)
      if (!(a.pred == Symbol("true") && a.args.empty())) r.body.push_back(std::move(a));
    expect(Tok::Dot, "'.' at end of rule");
    return r;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
  int last_col_ = 1;
};

void collect_program_functors(const Term& t, std::set<std::pair<Symbol, std::size_t>>& out) {
  if (t.is_var()) return;
  out.emplace(t.functor(), t.arity());
  for (const auto& a : t.args()) collect_program_functors(a, out);
}

std::string items_to_string(const std::vector<Atom>& items) {
  if (items.empty()) return "true";
  std::string s;
  for (const auto& a : items) {
    if (!s.empty()) s += ", ";
    s += to_string(a);
  }
  return s;
}

}  // namespace

VarSet Rule::vars() const {
  VarSet s = free_vars(std::span<const Atom>(head));
  for (const auto& e : guard.eqs) {
    collect_vars(e.lhs, s);
    collect_vars(e.rhs, s);
  }
  for (const auto& a : body)
    for (const auto& t : a.args) collect_vars(t, s);
  return s;
}

bool Program::simplification_only() const {
  for (const auto& r : rules)
    if (r.kind != RuleKind::Simplification) return false;
  return true;
}

std::size_t Program::max_rule_vars() const {
  std::size_t m = 0;
  for (const auto& r : rules) m = std::max(m, r.vars().size());
  return m;
}

std::vector<std::pair<Symbol, std::size_t>> Program::functors() const {
  std::set<std::pair<Symbol, std::size_t>> out;
  for (const auto& r : rules) {
    for (const auto& a : r.head)
      for (const auto& t : a.args) collect_program_functors(t, out);
    for (const auto& e : r.guard.eqs) {
      collect_program_functors(e.lhs, out);
      collect_program_functors(e.rhs, out);
    }
    for (const auto& a : r.body)
      for (const auto& t : a.args) collect_program_functors(t, out);
  }
  return {out.begin(), out.end()};
}

AtomMultiset Goal::user_atoms() const {
  AtomMultiset m;
  for (const auto& a : items)
    if (a.is_user()) m.add(a);
  return m;
}

std::vector<Atom> Goal::builtin_items() const {
  std::vector<Atom> out;
  for (const auto& a : items)
    if (a.is_builtin()) out.push_back(a);
  return out;
}

VarSet Goal::free_vars() const { return chrsem::free_vars(std::span<const Atom>(items)); }

VarId GoalScope::lookup(const std::string& name) {
  auto [it, fresh] = names_.emplace(name, next_);
  if (fresh) ++next_;
  return it->second;
}

VarId GoalScope::fresh() { return next_++; }

void GoalScope::bind(const std::string& name, VarId id) {
  names_[name] = id;
  if (id >= next_) next_ = id + 1;
}

Program parse_program(const std::string& text) { return Parser(text).program(); }

Goal parse_goal(const std::string& text, GoalScope& scope) {
  VarTable vars;
  vars.scope = &scope;
  Goal g;
  g.items = Parser(text).items(vars, true);
  g.vars = vars.order;
  g.var_names = vars.order_names;
  return g;
}

Goal parse_goal(const std::string& text) {
  GoalScope scope;
  return parse_goal(text, scope);
}

Goal combine(const Goal& a, const Goal& b) {
  Goal g = a;
  g.items.insert(g.items.end(), b.items.begin(), b.items.end());
  for (std::size_t i = 0; i < b.vars.size(); ++i)
    if (std::find(g.vars.begin(), g.vars.end(), b.vars[i]) == g.vars.end()) {
      g.vars.push_back(b.vars[i]);
      g.var_names.push_back(b.var_names[i]);
    }
  return g;
}

BuiltinFormula parse_builtins(const std::string& text, GoalScope& scope) {
  VarTable vars;
  vars.scope = &scope;
  auto items = Parser(text).items(vars, false);
  for (const auto& a : items)
    if (a.is_user()) throw ParseError("user constraint where a built-in was expected", 1, 1);
  return BuiltinFormula::from_items(items);
}

std::vector<Atom> parse_atoms(const std::string& text, GoalScope& scope) {
  VarTable vars;
  vars.scope = &scope;
  auto items = Parser(text).items(vars, false);
  for (const auto& a : items)
    if (!a.is_user()) throw ParseError("built-in where a user constraint was expected", 1, 1);
  return items;
}

Rule rename_rule(const Rule& r, VarId base) {
  Substitution ren;
  for (auto v : r.vars()) ren.emplace(v, Term::var(base + v - 1));
  Rule out = r;
  for (auto& a : out.head) a = substitute(ren, a);
  for (auto& e : out.guard.eqs) {
    e.lhs = substitute(ren, e.lhs);
    e.rhs = substitute(ren, e.rhs);
  }
  for (auto& a : out.body) a = substitute(ren, a);
  return out;
}

std::string to_string(const Rule& r) {
  std::string s = r.name + " @ " + items_to_string(r.head);
  s += r.kind == RuleKind::Simplification ? " <=> " : " ==> ";
  if (!r.guard.is_true()) {
    std::vector<Atom> g;
    for (const auto& e : r.guard.eqs) g.push_back(Atom::equation(e.lhs, e.rhs));
    if (r.guard.falsum) g.push_back(Atom::falsum());
    s += items_to_string(g) + " | ";
  }
  return s + items_to_string(r.body) + ".";
}

std::string to_string(const Program& p) {
  std::string s;
  for (const auto& r : p.rules) s += to_string(r) + "\n";
  return s;
}

std::string to_string(const Goal& g) { return items_to_string(g.items); }

}  // namespace chrsem
