// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "chrsem/harness.hpp"
#include "oracle.hpp"

using namespace chrsem;

namespace {

// Entailment against the independent oracle of the test support library,
// over the corpus signature.
CriterionResult entailment_vs_oracle(const Corpus& c, int queries) {
  CriterionResult r{6, "entailment against ground enumeration", true, "", 0};
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, int>> sig;
  for (const auto& [f, n] : corpus_signature(c)) sig.push_back({f.name(), static_cast<int>(n)});
  oracle::QueryGenerator gen(sig, 424242);
  int disagree = 0, positive = 0;
  for (int i = 0; i < queries; ++i) {
    auto q = gen.next();
    auto phi = oracle::from(q.eqs);
    for (auto& e : oracle::from(q.guard)) phi.push_back(e);
    std::set<int> xs(q.x.begin(), q.x.end());
    bool expected = oracle::entails(oracle::from(q.d), xs, phi, gen.signature());
    positive += expected;
    if (entails_exists(q.d, q.x, q.eqs, q.guard).holds != expected) ++disagree;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = disagree == 0 && positive > 0 && positive < queries;
  r.detail = std::to_string(queries) + " queries (" + std::to_string(positive) + " entailed), " +
             std::to_string(disagree) + " disagreements";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : default_corpus_dir();
  Corpus corpus;
  try {
    corpus = load_corpus(dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot load corpus: " << e.what() << "\n";
    return 2;
  }
  HarnessOptions o;
  std::vector<CompositionReport> reports;
  HarnessReport rep;
  rep.criteria.push_back(criterion_example());
  rep.criteria.push_back(criterion_compositionality(corpus, o, &reports));
  rep.criteria.push_back(criterion_correctness(corpus));
  rep.criteria.push_back(criterion_eta_laws(o));
  rep.criteria.push_back(criterion_variable_sets(corpus));
  auto lib = criterion_entailment(corpus, o);
  auto ext = entailment_vs_oracle(corpus, 500);
  ext.pass = ext.pass && lib.pass;
  ext.detail += "; library self-check: " + lib.detail;
  rep.criteria.push_back(ext);
  rep.criteria.push_back(criterion_domain(corpus, reports));
  std::string first = harness_artifacts(corpus, o, &reports);
  rep.criteria.push_back(criterion_determinism(corpus, o, first));

  for (const auto& c : rep.criteria) {
    std::printf("%s criterion %d: %s (%s, %.2fs)\n", c.pass ? "PASS" : "FAIL", c.id,
                c.title.c_str(), c.detail.c_str(), c.seconds);
  }
  return rep.all_pass() ? 0 : 1;
}
