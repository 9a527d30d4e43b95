#pragma once

// Reference interpreter: the standard transition system (Solve, Introduce,
// Simplify, Propagate) explored exhaustively up to a depth bound.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "chrsem/store.hpp"
#include "chrsem/syntax.hpp"

namespace chrsem {

struct StdOptions {
  /// Maximum number of transitions along a branch.
  int depth = 6;
  /// Fire propagation rules repeatedly on the same atoms.
  bool naive = false;
  /// When false, Introduce moves do not count towards `depth`.
  bool count_introduce = true;
  /// First id of the renamed-rule variable blocks; 0 picks one above the goal.
  VarId var_base = 0;
};

struct StoreAtom {
  std::uint32_t id = 0;
  Atom atom;
};

struct StdConfig {
  std::vector<Atom> goal;
  std::vector<StoreAtom> chr;
  Store store;
  /// Propagation history: (rule, ids of the matched atoms in head order).
  std::set<std::pair<std::string, std::vector<std::uint32_t>>> fired;
  std::uint32_t next_atom_id = 0;
  /// Rule applications so far; picks the renaming block.
  std::uint32_t rewrites = 0;

  bool failed() const { return store.inconsistent(); }
  AtomMultiset chr_atoms() const;
  std::string key() const;
};

enum class StdMove { Solve, Introduce, Simplify, Propagate };
const char* to_string(StdMove m);

struct StdSuccessor {
  StdMove move;
  std::string rule;  // empty for Solve / Introduce
  StdConfig config;
};

struct StdEngine {
  const Program& program;
  StdOptions options;
  VarId base;
  VarId stride;

  StdEngine(const Program& p, const Goal& g, StdOptions o);
  StdConfig initial(const Goal& g) const;
  std::vector<StdSuccessor> step(const StdConfig& cfg) const;
};

/// Successor configurations of `cfg`, renaming rules into block `cfg.rewrites`.
std::vector<StdSuccessor> std_step(const StdConfig& cfg, const Program& prog,
                                   const StdOptions& opts, VarId base, VarId stride);

struct AnswerSet {
  std::set<std::string> answers;
  bool truncated = false;
  std::size_t configurations = 0;
};

AnswerSet data_sufficient_answers(const Program& prog, const Goal& goal, const StdOptions& opts);
AnswerSet qualified_answers(const Program& prog, const Goal& goal, const StdOptions& opts);

struct Derivation {
  std::vector<StdConfig> configs;
  std::vector<std::string> moves;  // "solve", "introduce", rule names
  bool truncated = false;
};

/// All maximal paths of at most `opts.depth` transitions. Throws
/// std::invalid_argument for depth < 1.
std::vector<Derivation> std_derivations(const Program& prog, const Goal& goal,
                                        const StdOptions& opts);

/// exists_{-Fv(goal)} d, printed with the goal's variable names.
std::string render_answer(const Store& d, const Goal& goal);
/// exists_{-Fv(goal)} (K /\ d).
std::string render_qualified(const AtomMultiset& k, const Store& d, const Goal& goal);

}  // namespace chrsem
