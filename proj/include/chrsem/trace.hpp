#pragma once

// Transition system with assumptions (Solve', Simplify') over indexed goals,
// and bounded enumeration of the concrete sequences it generates.

#include <optional>
#include <string>
#include <vector>

#include "chrsem/store.hpp"
#include "chrsem/syntax.hpp"

namespace chrsem {

struct CompConfig {
  AtomMultiset goal;  // indexed user atoms and pending built-ins
  Store store;
};

/// ⟨G,c,K,G',d⟩. Terminal tuples have K = ∅, G' = G and d = c.
struct ConcreteStep {
  AtomMultiset G;
  Store c;
  AtomMultiset K;
  AtomMultiset G2;
  Store d;
  /// The part of K instantiated from the assumption pool (not most general).
  AtomMultiset K_pool;
  /// Rule name for Simplify' steps, "solve" for Solve', empty for terminal.
  std::string rule;

  bool terminal() const { return rule.empty(); }
};

struct ConcreteSequence {
  std::vector<ConcreteStep> steps;
};

struct CompTransition {
  std::string rule;  // "solve" for Solve'
  AtomMultiset K;
  AtomMultiset K_pool;
  CompConfig next;
};

/// Successors of `cfg`. Rules are renamed into the variable block starting at
/// `block`. Assumed head atoms are either the renamed head atom itself or an
/// instance drawn from `pool`; with `assumptions` false only full-head matches
/// are produced. Propagation rules are rejected (std::invalid_argument).
std::vector<CompTransition> comp_step(const CompConfig& cfg, const Program& prog, VarId block,
                                      const std::vector<Atom>& pool, bool assumptions);

struct TraceOptions {
  /// Maximum sequence length (number of tuples).
  int depth = 4;
  /// Candidate input stores beyond the previous output.
  std::vector<Store> strengthen;
  /// Optional, parallel to `strengthen`: the partner positions (ascending)
  /// whose output is that store. Using a store consumes partner steps up to
  /// the position, and length + consumed partner steps is bounded by depth.
  /// Without positions each strengthened input consumes one partner step.
  std::vector<std::vector<int>> strengthen_at;
  /// Candidate instances for assumed atoms.
  std::vector<Atom> pool;
  bool assumptions = true;
  /// First id of the renamed-rule blocks; 0 picks one above the goal.
  VarId var_base = 0;
};

struct TraceSet {
  std::vector<ConcreteSequence> sequences;
  bool truncated = false;
  VarId base = 0;
  VarId stride = 0;
};

/// Goal items indexed 0.
AtomMultiset initial_goal(const Goal& g);

TraceSet enumerate_sprime(const Program& prog, const Goal& goal, const TraceOptions& opts);

struct ConcreteVarSets {
  VarSet loc, ass, stable, constr;
};

VarSet local_vars(const ConcreteStep& t);
VarSet step_vars(const ConcreteStep& t);
ConcreteVarSets var_sets_concrete(const ConcreteSequence& delta);

/// The four compatibility conditions of a step with the sequence that follows.
bool is_compatible(const ConcreteStep& t, const ConcreteSequence& delta);

/// Chaining, store monotonicity, terminal tail, no step out of `false`.
/// Returns a description of the first violation.
std::optional<std::string> validate_sequence(const ConcreteSequence& delta);

std::string to_string(const ConcreteStep& t);
std::string to_string(const ConcreteSequence& delta);

}  // namespace chrsem
