#pragma once

// Discharge of assumptions against stable atoms (the eta closure), the
// interleaving of two abstract sequences, and the compositionality check.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chrsem/abstraction.hpp"

namespace chrsem {

/// H~_1 = H_1^1, H~_i = H~_{i-1} + (H_i \ H_{i-1})^i.
struct IndexedStableView {
  std::vector<AtomMultiset> H;
};

IndexedStableView indexed_stable(const AbstractSequence& s);

/// Removes the indexed atoms W from every H~_i, then drops the indexes.
/// Throws std::invalid_argument unless W is included in H~_n.
AbstractSequence seq_minus(const AbstractSequence& s, const AtomMultiset& W);

struct Discharge {
  std::size_t tuple = 0;  // 1-based
  Atom assumption;
  Atom stable;  // indexed
  Store at;     // input store of the tuple
};

struct CompositionCertificate {
  std::size_t left = 0, right = 0;  // positions in the component sets
  /// Side ('1' or '2') contributing each tuple of the interleaving.
  std::string interleaving;
  std::vector<Discharge> discharges;
};

/// A composed sequence with the audit trail that produced it.
struct Composed {
  AbstractSequence seq;
  CompositionCertificate cert;
};

/// Can assumption `a` be discharged by stable atom `b` under store c?
bool dischargeable(const Store& c, const Atom& a, const Atom& b);

/// Least superset of S closed under discharging one assumption against an
/// indexed stable atom available at its tuple.
std::vector<AbstractSequence> eta(const std::vector<AbstractSequence>& S);

/// eta for one sequence, keeping the discharges made for every member.
std::vector<Composed> eta_with_certificates(const Composed& start);

/// Rebuilds the interleaving recorded in `interleaving` (no D check).
std::optional<AbstractSequence> merge_by(const AbstractSequence& s1, const AbstractSequence& s2,
                                         const std::string& interleaving);

/// Rebuilds the interleaving, re-checks every discharge in order (store
/// equivalence, stable atom still available) and compares the outcome with
/// `result` up to renaming.
bool replay_certificate(const AbstractSequence& s1, const AbstractSequence& s2,
                        const CompositionCertificate& cert, const AbstractSequence& result);

struct InterleaveOptions {
  /// Keep only interleavings with instore true and c_{i+1} equivalent to d_i.
  bool chained = false;
};

/// (V_loc(s1) + Fv(G1)) meets (V_loc(s2) + Fv(G2)) exactly in Fv(G1) & Fv(G2).
bool hygienic(const AbstractSequence& s1, const AbstractSequence& s2);

/// All interleavings of s1 and s2 that are members of D. The goal of the
/// results is the conjunction of both goals. Throws std::invalid_argument
/// when the pair is not hygienic.
std::vector<Composed> interleave(const AbstractSequence& s1, const AbstractSequence& s2,
                                 const InterleaveOptions& opts = {});

/// The two variable conditions of the set-level composition for a member
/// sigma of eta(s1 || s2).
bool composition_side_conditions(const AbstractSequence& sigma, const VarSet& loc12);

/// S1 || S2 at the level of sets, with a certificate per result.
std::vector<Composed> compose_sets(const std::vector<AbstractSequence>& S1,
                                   const std::vector<AbstractSequence>& S2,
                                   const InterleaveOptions& opts = {});

struct CompositionOptions {
  /// Maximum sequence length on the conjoined goal.
  int depth = 4;
  int jobs = 1;
  /// Added to every renaming block (reproducible fresh ids).
  VarId seed = 0;
};

struct CompositionReport {
  std::set<std::string> lhs, rhs, only_lhs, only_rhs;
  /// Harvesting of partner stores and atoms stopped before a fixpoint, so
  /// the right-hand side may be missing members.
  bool truncated = false;
  int rounds = 0;
  std::size_t pairs = 0;
  std::vector<Composed> witnesses;  // RHS members, one per canonical string

  bool equal() const { return only_lhs.empty() && only_rhs.empty(); }
};

/// Compares the abstraction of the traces of (G1,G2) with the composition of
/// the traces of G1 and G2, on sequences with instore true, chained stores
/// and no assumption left that was drawn from a partner.
CompositionReport check_compositionality(const Program& prog, const Goal& g1, const Goal& g2,
                                         const CompositionOptions& opts);

}  // namespace chrsem
