#pragma once

// JSON persistence of abstract sequence sets ("chrsem-traces", version 1).

#include <stdexcept>
#include <string>
#include <vector>

#include "chrsem/composition.hpp"

namespace chrsem {

class TraceFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceFile {
  static constexpr int kVersion = 1;

  std::string program;  // source text
  std::string goal;     // source text
  int depth = 0;
  Goal parsed_goal;
  std::vector<AbstractSequence> sequences;
  /// Empty, or one per sequence.
  std::vector<CompositionCertificate> certificates;
};

/// Canonical JSON text: sequences sorted by canonical form, stable key
/// order, LF line endings.
std::string dump_traces(const TraceFile& f);

/// Parses and validates a trace file. Goal variables are looked up in
/// `scope`; every other variable gets a fresh id from it. Throws
/// TraceFileError for malformed input, a version mismatch or a sequence
/// outside D (the message names the sequence and tuple).
TraceFile parse_traces(const std::string& text, GoalScope& scope);

void save_traces(const std::string& path, const TraceFile& f);
TraceFile load_traces(const std::string& path, GoalScope& scope);

/// Display names of the goal variables, with anonymous ones replaced by
/// `_A<k>` so that they can be read back.
std::vector<std::string> goal_var_names(const Goal& g);

}  // namespace chrsem
