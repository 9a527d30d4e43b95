#pragma once

// Concrete syntax for CHR programs and goals.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chrsem/store.hpp"
#include "chrsem/term.hpp"

namespace chrsem {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class RuleKind { Simplification, Propagation };

struct Rule {
  std::string name;
  RuleKind kind = RuleKind::Simplification;
  std::vector<Atom> head;
  BuiltinFormula guard;
  /// User atoms, equations and `false`, in source order.
  std::vector<Atom> body;

  VarSet vars() const;
};

struct Program {
  std::vector<Rule> rules;

  bool simplification_only() const;
  /// Largest number of distinct variables in any rule.
  std::size_t max_rule_vars() const;
  /// Function symbols (name, arity) of every term in the program.
  std::vector<std::pair<Symbol, std::size_t>> functors() const;
};

struct Goal {
  /// User atoms, equations and `false`.
  std::vector<Atom> items;
  /// Goal variables in order of first occurrence (anonymous ones too).
  std::vector<VarId> vars;
  /// Source names, parallel to `vars`.
  std::vector<std::string> var_names;

  AtomMultiset user_atoms() const;
  std::vector<Atom> builtin_items() const;
  VarSet free_vars() const;
};

/// Variable naming shared by several goals, so that `U` in two goals is the
/// same variable. Ids are allocated from 1 upwards.
class GoalScope {
 public:
  VarId lookup(const std::string& name);
  VarId fresh();
  /// Makes `name` denote the existing variable `id`.
  void bind(const std::string& name, VarId id);
  VarId max_id() const { return next_ - 1; }
  const std::map<std::string, VarId>& names() const { return names_; }

 private:
  std::map<std::string, VarId> names_;
  VarId next_ = 1;
};

Program parse_program(const std::string& text);
Goal parse_goal(const std::string& text, GoalScope& scope);
Goal parse_goal(const std::string& text);
Goal combine(const Goal& a, const Goal& b);
/// Equations (and `true`/`false`) only, as in stored trace files.
BuiltinFormula parse_builtins(const std::string& text, GoalScope& scope);
/// Comma-separated user atoms.
std::vector<Atom> parse_atoms(const std::string& text, GoalScope& scope);

/// Copy of the rule with variable v renamed to base + v - 1 (rule variables
/// are numbered from 1 by the parser).
Rule rename_rule(const Rule& r, VarId base);

std::string to_string(const Rule& r);
std::string to_string(const Program& p);
std::string to_string(const Goal& g);

}  // namespace chrsem
