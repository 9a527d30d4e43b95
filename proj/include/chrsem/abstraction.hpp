#pragma once

// Abstract sequences <c,K,H,d>, stable atoms and the abstraction map from
// concrete sequences.

#include <optional>
#include <string>
#include <vector>

#include "chrsem/canonical.hpp"
#include "chrsem/trace.hpp"

namespace chrsem {

struct AbstractTuple {
  Store c;
  AtomMultiset K;
  AtomMultiset H;
  Store d;
  /// Part of K instantiated from an assumption pool. Bookkeeping for the
  /// compositionality checker; not part of the semantic value.
  AtomMultiset K_pool;
};

struct AbstractSequence {
  std::vector<AbstractTuple> tuples;
  /// The goal the sequence was computed for (its variables are fixed under
  /// canonical renaming).
  Goal goal;

  std::size_t size() const { return tuples.size(); }
};

/// Indexed atoms present in every goal of delta.
AtomMultiset stable_atoms(const ConcreteSequence& delta);

/// Stable multisets of every suffix, H_i for i = 1..n (indexed).
std::vector<AtomMultiset> suffix_stable_atoms(const ConcreteSequence& delta);

AbstractSequence alpha(const ConcreteSequence& delta, const Goal& goal);

struct AbstractVarSets {
  VarSet ass, stable, constr, loc;
};

AbstractVarSets var_sets_abstract(const AbstractSequence& sigma);
/// The same four sets on the concrete side (loc per sequence, not per step).
AbstractVarSets var_sets_of(const ConcreteSequence& delta, const Goal& goal);

const Store& instore(const AbstractSequence& s);
const Store& store(const AbstractSequence& s);
const Store& instore(const ConcreteSequence& s);
const Store& store(const ConcreteSequence& s);

/// delta (+) W: W adjoined to every goal.
ConcreteSequence seq_plus(const ConcreteSequence& delta, const AtomMultiset& W);
/// delta (-) W: W removed from every goal. Throws std::invalid_argument
/// unless W is stable in delta.
ConcreteSequence seq_minus(const ConcreteSequence& delta, const AtomMultiset& W);

struct DomainViolation {
  std::size_t tuple = 0;  // 1-based
  std::string what;
};

/// Membership in D: implies(d_i, c_i), H_i included in H_{i+1},
/// implies(c_{i+1}, d_i), last tuple <c,{},H,c>.
std::optional<DomainViolation> validate_domain(const AbstractSequence& s);

Structure to_structure(const AbstractSequence& s);
std::string canonical_string(const AbstractSequence& s);
std::string to_string(const AbstractSequence& s);

}  // namespace chrsem
