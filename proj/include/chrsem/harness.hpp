#pragma once

// Bundled corpus and the reproducibility harness over it.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chrsem/composition.hpp"
#include "chrsem/observables.hpp"

namespace chrsem {

struct CorpusProgram {
  std::string name;
  std::string file;
  std::string source;
  Program program;
  /// Sequence-length bound for compositionality and the variable-set check.
  int depth = 4;
  /// Sequence-length bound for the correctness comparison.
  int correctness_depth = 6;
  std::vector<std::pair<std::string, std::string>> splits;
  std::vector<std::string> goals;

  /// Every goal mentioned: split halves, joined splits and extra goals.
  std::vector<std::string> all_goals() const;
};

struct Corpus {
  std::string dir;
  std::vector<CorpusProgram> programs;
};

/// $CHR_CORPUS_DIR, or the corpus directory of the source tree.
std::string default_corpus_dir();
/// Reads `manifest.json` and the programs it lists. Throws
/// std::runtime_error on missing files and ParseError on bad programs.
Corpus load_corpus(const std::string& dir);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct HarnessOptions {
  /// Offset for fresh variable blocks.
  VarId seed = 0;
  int jobs = 1;
  /// Random abstract-sequence sets for the eta laws.
  int eta_sets = 200;
  /// Random queries for the entailment cross-check.
  int entailment_queries = 500;
  std::uint64_t rng_seed = 20240611;
};

struct HarnessReport {
  std::vector<CriterionResult> criteria;
  /// JSON artifacts of the first run (traces, answers, comparisons).
  std::string artifacts;

  bool all_pass() const;
  std::string table() const;
  std::string json() const;
};

CriterionResult criterion_example();
CriterionResult criterion_compositionality(const Corpus& c, const HarnessOptions& o,
                                           std::vector<CompositionReport>* reports = nullptr);
CriterionResult criterion_correctness(const Corpus& c);
CriterionResult criterion_eta_laws(const HarnessOptions& o);
CriterionResult criterion_variable_sets(const Corpus& c);
/// Cross-check of entails_exists against ground enumeration.
CriterionResult criterion_entailment(const Corpus& c, const HarnessOptions& o);
CriterionResult criterion_domain(const Corpus& c, const std::vector<CompositionReport>& reports);
CriterionResult criterion_determinism(const Corpus& c, const HarnessOptions& o,
                                      const std::string& first_run);

/// Deterministic JSON artifacts: answers, trace dumps and composition
/// reports for the whole corpus. `reports` are reused when given.
std::string harness_artifacts(const Corpus& c, const HarnessOptions& o,
                              const std::vector<CompositionReport>* reports = nullptr);

/// All criteria; an empty corpus gives an empty report.
HarnessReport run_harness(const Corpus& c, const HarnessOptions& o);

/// Random member of D over predicates p, q, r (arity 1), constants a, b and
/// variables 1..6, of length at most 4.
AbstractSequence random_abstract_sequence(std::mt19937_64& rng);

/// Function symbols of every corpus program.
std::vector<std::pair<Symbol, std::size_t>> corpus_signature(const Corpus& c);

}  // namespace chrsem
