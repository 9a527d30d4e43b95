#pragma once

// Connected sequences and the data sufficient answers they denote.

#include <set>
#include <string>

#include "chrsem/abstraction.hpp"
#include "chrsem/standard.hpp"

namespace chrsem {

struct ConnectedFlag {
  bool connected = true;
  /// 1: an assumption is present; 2: d_j and c_{j+1} differ; 3: stable atoms
  /// left at the end of a consistent sequence. 0 when connected.
  int clause = 0;
  std::size_t tuple = 0;  // 1-based tuple where the clause fails

  explicit operator bool() const { return connected; }
};

ConnectedFlag is_connected(const AbstractSequence& s);

/// Projected final stores of the connected traces of `goal` that start from
/// the empty store. `depth` bounds the sequence length.
AnswerSet sa_from_traces(const Program& prog, const Goal& goal, int depth);

struct CorrectnessReport {
  std::set<std::string> lhs;  // standard engine
  std::set<std::string> rhs;  // traces
  std::set<std::string> only_lhs, only_rhs;
  bool truncated = false;

  bool equal() const { return only_lhs.empty() && only_rhs.empty(); }
};

/// Sequences of length L have L-1 Solve/Simplify steps; the standard engine
/// is run with the same number of Solve/Simplify transitions, Introduce moves
/// not counted.
CorrectnessReport check_correctness(const Program& prog, const Goal& goal, int depth);

}  // namespace chrsem
