#pragma once

// Herbrand equality theory: solved-form stores, entailment and projection.

#include <string>
#include <vector>

#include "chrsem/term.hpp"

namespace chrsem {

struct Equation {
  Term lhs;
  Term rhs;
};

/// Surface built-in constraint: a conjunction of equations, or `false`.
struct BuiltinFormula {
  std::vector<Equation> eqs;
  bool falsum = false;

  static BuiltinFormula truth() { return {}; }
  static BuiltinFormula contradiction() { return {{}, true}; }
  static BuiltinFormula of(Term l, Term r) { return {{{std::move(l), std::move(r)}}, false}; }
  bool is_true() const { return eqs.empty() && !falsum; }
  /// Builtin goal items (equations, `false`) as a formula.
  static BuiltinFormula from_items(std::span<const Atom> items);
};

/// Either Inconsistent or an idempotent most general unifier. Variable-to-
/// variable bindings always point from the higher id to the lower id.
class Store {
 public:
  static Store top() { return Store(); }
  static Store bottom() {
    Store s;
    s.inconsistent_ = true;
    return s;
  }

  bool inconsistent() const { return inconsistent_; }
  bool is_true() const { return !inconsistent_ && bindings_.empty(); }
  const Substitution& bindings() const { return bindings_; }

  /// Built from an arbitrary substitution (normalized and checked).
  static Store from_bindings(const Substitution& s);
  /// Caller guarantees `s` is already an idempotent solved form.
  static Store solved(Substitution s) {
    Store r;
    r.bindings_ = std::move(s);
    return r;
  }

  friend bool operator==(const Store&, const Store&) = default;

 private:
  bool inconsistent_ = false;
  Substitution bindings_;
};

Store solve(const Store& d, const BuiltinFormula& c);
Store solve(const Store& d, const Term& lhs, const Term& rhs);
Store conjoin(const Store& a, const Store& b);

struct Entailment {
  bool holds = false;
  Substitution witness;  // bindings of the existential variables
};

/// CT |= d -> exists x. (eqs /\ guard). Variables outside x are rigid.
Entailment entails_exists(const Store& d, const VarSet& x, const BuiltinFormula& eqs,
                          const BuiltinFormula& guard);

bool is_false(const Store& d);
/// CT |= c1 -> c2.
bool implies(const Store& c1, const Store& c2);
bool equivalent(const Store& a, const Store& b);

/// exists_{-keep} d. `keep` order decides which kept variable represents a
/// class of kept variables (the last one wins).
Store project(const Store& d, const std::vector<VarId>& keep);

VarSet free_vars(const Store& d);
std::vector<Equation> equations(const Store& d);
Store rename(const Store& d, const Substitution& renaming);

/// Representation independent of binding orientation: classes of variables
/// that are equal are rooted at their greatest id.
std::string raw_key(const Store& d);
std::string to_string(const Store& d);

}  // namespace chrsem
