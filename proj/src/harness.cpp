#include "chrsem/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "chrsem/trace_file.hpp"
#include "json.hpp"

#ifndef CHRSEM_CORPUS_DIR
#define CHRSEM_CORPUS_DIR "corpus"
#endif

namespace chrsem {

using ojson = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

}  // namespace

std::vector<std::string> CorpusProgram::all_goals() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& g) {
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
  };
  for (const auto& [a, b] : splits) {
    add(a);
    add(b);
    add(a + ", " + b);
  }
  for (const auto& g : goals) add(g);
  return out;
}

std::string default_corpus_dir() {
  if (const char* env = std::getenv("CHR_CORPUS_DIR"); env && *env) return env;
  return CHRSEM_CORPUS_DIR;
}

Corpus load_corpus(const std::string& dir) {
  Corpus c;
  c.dir = dir;
  ojson m;
  try {
    m = ojson::parse(read_file(dir + "/manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad corpus manifest: " + std::string(e.what()));
  }
  try {
    for (const auto& pj : m.at("programs")) {
      CorpusProgram p;
      p.name = pj.at("name").get<std::string>();
      p.file = pj.at("file").get<std::string>();
      p.source = read_file(dir + "/" + p.file);
      p.program = parse_program(p.source);
      p.depth = pj.value("depth", 4);
      p.correctness_depth = pj.value("correctness_depth", 6);
      for (const auto& s : pj.value("splits", ojson::array()))
        p.splits.emplace_back(s.at(0).get<std::string>(), s.at(1).get<std::string>());
      for (const auto& g : pj.value("goals", ojson::array())) p.goals.push_back(g.get<std::string>());
      c.programs.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad corpus manifest: " + std::string(e.what()));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 1. The g/h example.

CriterionResult criterion_example() {
  CriterionResult r{1, "g/h example answers", false, "", 0};
  auto t0 = Clock::now();
  Program p = parse_program("gh @ g(X), h(Y) <=> true | X = Y.");
  StdOptions o;
  o.depth = 8;
  struct Case {
    const char* goal;
    std::set<std::string> expected;
  } cases[] = {{"g(U)", {}}, {"k(U), h(V)", {}}, {"g(U), h(V)", {"U = V"}}};
  bool ok = true;
  for (const auto& cs : cases) {
    auto got = data_sufficient_answers(p, parse_goal(cs.goal), o).answers;
    std::string shown;
    for (const auto& a : got) shown += (shown.empty() ? "" : "; ") + a;
    r.detail += std::string(r.detail.empty() ? "" : ", ") + "SA(" + cs.goal + ") = {" + shown + "}";
    ok = ok && got == cs.expected;
  }
  r.seconds = since(t0);
  r.pass = ok && r.seconds < 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// 2. Compositionality on every corpus split.

CriterionResult criterion_compositionality(const Corpus& c, const HarnessOptions& o,
                                           std::vector<CompositionReport>* reports) {
  CriterionResult r{2, "compositionality on corpus splits", true, "", 0};
  auto t0 = Clock::now();
  std::size_t checks = 0, failures = 0;
  bool shape_ok = c.programs.size() >= 5;
  for (const auto& p : c.programs) {
    if (p.splits.size() < 3) shape_ok = false;
    for (const auto& [a, b] : p.splits) {
      GoalScope scope;
      Goal g1 = parse_goal(a, scope), g2 = parse_goal(b, scope);
      CompositionOptions co;
      co.depth = std::min(p.depth, 5);
      co.jobs = o.jobs;
      co.seed = o.seed;
      CompositionReport rep = check_compositionality(p.program, g1, g2, co);
      ++checks;
      if (!rep.equal() || rep.truncated) {
        ++failures;
        r.detail += p.name + " [" + a + " | " + b + "]: " + std::to_string(rep.only_lhs.size()) +
                    " only left, " + std::to_string(rep.only_rhs.size()) + " only right" +
                    (rep.truncated ? ", truncated" : "") + "; ";
      }
      if (reports) reports->push_back(std::move(rep));
    }
  }
  r.seconds = since(t0);
  if (!shape_ok) r.detail += "corpus needs >= 5 programs with >= 3 splits each; ";
  r.pass = shape_ok && failures == 0 && r.seconds < 60.0;
  r.detail += std::to_string(checks) + " splits, " + std::to_string(failures) + " unequal";
  return r;
}

// ---------------------------------------------------------------------------
// 3. Standard answers against connected traces.

CriterionResult criterion_correctness(const Corpus& c) {
  CriterionResult r{3, "data sufficient answers from traces", true, "", 0};
  auto t0 = Clock::now();
  std::size_t checks = 0, failures = 0;
  for (const auto& p : c.programs) {
    for (const auto& g : p.all_goals()) {
      auto rep = check_correctness(p.program, parse_goal(g), p.correctness_depth);
      ++checks;
      if (!rep.equal()) {
        ++failures;
        r.detail += p.name + " [" + g + "] differs; ";
      }
    }
  }
  r.seconds = since(t0);
  r.pass = failures == 0 && r.seconds < 30.0;
  r.detail += std::to_string(checks) + " goals, " + std::to_string(failures) + " differing";
  return r;
}

// ---------------------------------------------------------------------------
// 4. eta is extensive, idempotent and monotone.

namespace {

Term rand_leaf(std::mt19937_64& rng) {
  static const Symbol consts[] = {Symbol("a"), Symbol("b")};
  std::uniform_int_distribution<int> pick(0, 7);
  int k = pick(rng);
  if (k < 6) return Term::var(static_cast<VarId>(k + 1));
  return Term::compound(consts[k - 6]);
}

Atom rand_atom(std::mt19937_64& rng) {
  static const Symbol preds[] = {Symbol("p"), Symbol("q"), Symbol("r")};
  std::uniform_int_distribution<int> pick(0, 2);
  return Atom::user(preds[pick(rng)], {rand_leaf(rng)});
}

AtomMultiset rand_atoms(std::mt19937_64& rng, int max) {
  std::uniform_int_distribution<int> n(0, max);
  AtomMultiset m;
  for (int i = n(rng); i > 0; --i) m.add(rand_atom(rng));
  return m;
}

Store strengthen_randomly(std::mt19937_64& rng, const Store& c) {
  std::bernoulli_distribution coin(0.4);
  if (!coin(rng)) return c;
  Store d = solve(c, rand_leaf(rng), rand_leaf(rng));
  return d.inconsistent() ? c : d;
}

std::set<std::string> exact_keys(const std::vector<AbstractSequence>& S) {
  std::set<std::string> out;
  for (const auto& s : S) out.insert(canonical_string(s));
  return out;
}

}  // namespace

AbstractSequence random_abstract_sequence(std::mt19937_64& rng) {
  AbstractSequence s;
  for (VarId v = 1; v <= 6; ++v) {
    s.goal.vars.push_back(v);
    s.goal.var_names.push_back("X" + std::to_string(v));
  }
  std::uniform_int_distribution<int> len(1, 4);
  int n = len(rng);
  Store c = strengthen_randomly(rng, Store::top());
  AtomMultiset H = rand_atoms(rng, 2);
  for (int i = 0; i < n; ++i) {
    AbstractTuple t;
    t.c = c;
    t.H = H;
    if (i + 1 == n) {
      t.d = c;
    } else {
      t.K = rand_atoms(rng, 2);
      t.d = strengthen_randomly(rng, c);
      c = strengthen_randomly(rng, t.d);
      H = H + rand_atoms(rng, 1);
    }
    s.tuples.push_back(std::move(t));
  }
  return s;
}

CriterionResult criterion_eta_laws(const HarnessOptions& o) {
  CriterionResult r{4, "eta closure laws", true, "", 0};
  auto t0 = Clock::now();
  std::mt19937_64 rng(o.rng_seed);
  std::uniform_int_distribution<int> size(1, 4);
  std::bernoulli_distribution keep(0.5);
  int bad_ext = 0, bad_idem = 0, bad_mono = 0;
  for (int k = 0; k < o.eta_sets; ++k) {
    std::vector<AbstractSequence> S, sub;
    for (int i = size(rng); i > 0; --i) {
      S.push_back(random_abstract_sequence(rng));
      if (keep(rng)) sub.push_back(S.back());
    }
    auto eS = eta(S);
    auto kS = exact_keys(S), keS = exact_keys(eS);
    if (!std::includes(keS.begin(), keS.end(), kS.begin(), kS.end())) ++bad_ext;
    if (exact_keys(eta(eS)) != keS) ++bad_idem;
    auto kSub = exact_keys(eta(sub));
    if (!std::includes(keS.begin(), keS.end(), kSub.begin(), kSub.end())) ++bad_mono;
  }
  r.seconds = since(t0);
  r.pass = bad_ext + bad_idem + bad_mono == 0 && o.eta_sets >= 200;
  r.detail = std::to_string(o.eta_sets) + " sets; counterexamples: extensive " +
             std::to_string(bad_ext) + ", idempotent " + std::to_string(bad_idem) +
             ", monotone " + std::to_string(bad_mono);
  return r;
}

// ---------------------------------------------------------------------------
// 5. Variable sets agree between a trace and its abstraction.

namespace {

template <class F>
void for_each_corpus_trace_set(const Corpus& c, F&& f) {
  for (const auto& p : c.programs) {
    for (const auto& g : p.all_goals()) {
      Goal goal = parse_goal(g);
      TraceOptions o;
      o.depth = std::min(p.depth, 5);
      f(p, goal, enumerate_sprime(p.program, goal, o));
    }
  }
}

}  // namespace

CriterionResult criterion_variable_sets(const Corpus& c) {
  CriterionResult r{5, "variable sets preserved by abstraction", true, "", 0};
  auto t0 = Clock::now();
  std::size_t seqs = 0, bad = 0;
  for_each_corpus_trace_set(c, [&](const CorpusProgram&, const Goal& goal, const TraceSet& ts) {
    for (const auto& delta : ts.sequences) {
      ++seqs;
      auto a = var_sets_of(delta, goal);
      auto b = var_sets_abstract(alpha(delta, goal));
      if (a.ass != b.ass || a.stable != b.stable || a.constr != b.constr || a.loc != b.loc) ++bad;
    }
  });
  r.seconds = since(t0);
  r.pass = bad == 0 && seqs > 0;
  r.detail = std::to_string(seqs) + " sequences, " + std::to_string(bad) + " mismatches";
  return r;
}

// ---------------------------------------------------------------------------
// 6. Entailment against ground enumeration.

std::vector<std::pair<Symbol, std::size_t>> corpus_signature(const Corpus& c) {
  std::set<std::pair<Symbol, std::size_t>> s;
  for (const auto& p : c.programs)
    for (const auto& f : p.program.functors()) s.insert(f);
  return {s.begin(), s.end()};
}

namespace {

struct EntailQuery {
  Store d;
  VarSet x;
  BuiltinFormula eqs, guard;
};

// Leaves are constants of the signature and the rigid variables 1, 2; the
// existential variables are 10 and 11.
class QueryGen {
 public:
  QueryGen(std::vector<std::pair<Symbol, std::size_t>> sig, std::uint64_t seed)
      : rng_(seed) {
    for (const auto& f : sig) (f.second == 0 ? consts_ : funs_).push_back(f);
    if (consts_.empty()) consts_.push_back({Symbol("a"), 0});
  }

  Term leaf(bool with_x) {
    std::uniform_int_distribution<int> k(0, static_cast<int>(consts_.size()) + (with_x ? 3 : 1));
    int i = k(rng_);
    if (i < static_cast<int>(consts_.size())) return Term::compound(consts_[i].first);
    i -= static_cast<int>(consts_.size());
    if (i < 2) return Term::var(static_cast<VarId>(i + 1));
    return Term::var(static_cast<VarId>(10 + (i - 2) % x_count_));
  }

  Term shallow(bool with_x) {
    std::bernoulli_distribution compound(0.35);
    if (funs_.empty() || !compound(rng_)) return leaf(with_x);
    std::uniform_int_distribution<std::size_t> f(0, funs_.size() - 1);
    const auto& fn = funs_[f(rng_)];
    std::vector<Term> args;
    for (std::size_t a = 0; a < fn.second; ++a) args.push_back(leaf(with_x));
    return Term::compound(fn.first, std::move(args));
  }

  EntailQuery next() {
    std::uniform_int_distribution<int> nx(1, 2), neq(0, 2), nd(0, 2);
    x_count_ = nx(rng_);
    EntailQuery q;
    for (int i = 0; i < x_count_; ++i) q.x.insert(static_cast<VarId>(10 + i));
    // The store binds rigid variables to leaves only.
    BuiltinFormula df;
    for (int i = nd(rng_); i > 0; --i) df.eqs.push_back({Term::var(static_cast<VarId>(1 + i % 2)), leaf(false)});
    q.d = solve(Store::top(), df);
    if (q.d.inconsistent()) q.d = Store::top();
    for (int i = neq(rng_); i > 0; --i) q.eqs.eqs.push_back({shallow(true), shallow(true)});
    std::bernoulli_distribution g(0.3);
    if (g(rng_)) q.guard.eqs.push_back({leaf(true), shallow(true)});
    return q;
  }

  std::vector<Term> universe() const {
    std::vector<Term> level{Term::var(1), Term::var(2)};
    for (const auto& c : consts_) level.push_back(Term::compound(c.first));
    std::vector<Term> all = level;
    for (int depth = 1; depth <= 2; ++depth) {
      std::vector<Term> next;
      for (const auto& f : funs_) {
        std::vector<std::size_t> idx(f.second, 0);
        for (;;) {
          std::vector<Term> args;
          for (auto i : idx) args.push_back(all[i]);
          next.push_back(Term::compound(f.first, std::move(args)));
          std::size_t k = 0;
          while (k < idx.size() && ++idx[k] == all.size()) idx[k++] = 0;
          if (k == idx.size()) break;
        }
      }
      for (auto& t : next)
        if (std::find(all.begin(), all.end(), t) == all.end()) all.push_back(t);
    }
    return all;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::pair<Symbol, std::size_t>> consts_, funs_;
  int x_count_ = 1;
};

bool ground_entails(const EntailQuery& q, const std::vector<Term>& universe) {
  std::vector<VarId> xs(q.x.begin(), q.x.end());
  std::vector<std::size_t> pick(xs.size(), 0);
  auto holds = [&](const Substitution& rho) {
    auto eval = [&](const Term& t) {
      return substitute(q.d.bindings(), substitute(rho, substitute(q.d.bindings(), t)));
    };
    for (const auto* f : {&q.eqs, &q.guard})
      for (const auto& e : f->eqs)
        if (!(eval(e.lhs) == eval(e.rhs))) return false;
    return true;
  };
  for (;;) {
    Substitution rho;
    for (std::size_t i = 0; i < xs.size(); ++i) rho.emplace(xs[i], universe[pick[i]]);
    if (holds(rho)) return true;
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == universe.size()) pick[k++] = 0;
    if (k == pick.size()) return false;
  }
}

}  // namespace

CriterionResult criterion_entailment(const Corpus& c, const HarnessOptions& o) {
  CriterionResult r{6, "entailment against ground enumeration", true, "", 0};
  auto t0 = Clock::now();
  QueryGen gen(corpus_signature(c), o.rng_seed);
  auto universe = gen.universe();
  int disagree = 0, positive = 0;
  for (int i = 0; i < o.entailment_queries; ++i) {
    EntailQuery q = gen.next();
    bool fast = entails_exists(q.d, q.x, q.eqs, q.guard).holds;
    bool slow = ground_entails(q, universe);
    positive += slow;
    if (fast != slow) ++disagree;
  }
  r.seconds = since(t0);
  r.pass = disagree == 0 && o.entailment_queries >= 500;
  r.detail = std::to_string(o.entailment_queries) + " queries (" + std::to_string(positive) +
             " entailed), " + std::to_string(disagree) + " disagreements";
  return r;
}

// ---------------------------------------------------------------------------
// 7. Everything enumerated or composed lies in D.

CriterionResult criterion_domain(const Corpus& c, const std::vector<CompositionReport>& reports) {
  CriterionResult r{7, "domain invariants", true, "", 0};
  auto t0 = Clock::now();
  std::size_t seen = 0, bad = 0;
  for_each_corpus_trace_set(c, [&](const CorpusProgram&, const Goal& goal, const TraceSet& ts) {
    for (const auto& delta : ts.sequences) {
      ++seen;
      if (validate_domain(alpha(delta, goal))) ++bad;
    }
  });
  for (const auto& rep : reports)
    for (const auto& w : rep.witnesses) {
      ++seen;
      if (validate_domain(w.seq)) ++bad;
    }
  r.seconds = since(t0);
  r.pass = bad == 0 && seen > 0;
  r.detail = std::to_string(seen) + " sequences, " + std::to_string(bad) + " violations";
  return r;
}

// ---------------------------------------------------------------------------
// 8. Determinism of the artifacts.

std::string harness_artifacts(const Corpus& c, const HarnessOptions& o,
                              const std::vector<CompositionReport>* reports) {
  ojson root;
  root["seed"] = o.seed;
  ojson progs = ojson::array();
  std::size_t next_report = 0;
  for (const auto& p : c.programs) {
    ojson pj;
    pj["name"] = p.name;
    ojson answers = ojson::object(), traces = ojson::object();
    for (const auto& g : p.all_goals()) {
      Goal goal = parse_goal(g);
      StdOptions so;
      so.depth = 8;
      auto sa = data_sufficient_answers(p.program, goal, so);
      answers[g] = std::vector<std::string>(sa.answers.begin(), sa.answers.end());
      TraceOptions to;
      to.depth = std::min(p.depth, 5);
      to.var_base = goal.vars.size() + 1 + o.seed;
      TraceFile f;
      f.program = p.source;
      f.goal = g;
      f.depth = to.depth;
      f.parsed_goal = goal;
      for (const auto& delta : enumerate_sprime(p.program, goal, to).sequences)
        f.sequences.push_back(alpha(delta, goal));
      traces[g] = ojson::parse(dump_traces(f));
    }
    pj["answers"] = std::move(answers);
    pj["traces"] = std::move(traces);
    ojson comps = ojson::array();
    for (const auto& [a, b] : p.splits) {
      CompositionReport rep;
      if (reports && next_report < reports->size()) {
        rep = (*reports)[next_report++];
      } else {
        GoalScope scope;
        Goal g1 = parse_goal(a, scope), g2 = parse_goal(b, scope);
        CompositionOptions co;
        co.depth = std::min(p.depth, 5);
        co.jobs = o.jobs;
        co.seed = o.seed;
        rep = check_compositionality(p.program, g1, g2, co);
      }
      ojson cj;
      cj["g1"] = a;
      cj["g2"] = b;
      cj["lhs"] = std::vector<std::string>(rep.lhs.begin(), rep.lhs.end());
      cj["rhs"] = std::vector<std::string>(rep.rhs.begin(), rep.rhs.end());
      cj["only_lhs"] = std::vector<std::string>(rep.only_lhs.begin(), rep.only_lhs.end());
      cj["only_rhs"] = std::vector<std::string>(rep.only_rhs.begin(), rep.only_rhs.end());
      cj["truncated"] = rep.truncated;
      comps.push_back(std::move(cj));
    }
    pj["compositionality"] = std::move(comps);
    progs.push_back(std::move(pj));
  }
  root["programs"] = std::move(progs);
  return root.dump(2) + "\n";
}

CriterionResult criterion_determinism(const Corpus& c, const HarnessOptions& o,
                                      const std::string& first_run) {
  CriterionResult r{8, "deterministic artifacts", true, "", 0};
  auto t0 = Clock::now();
  std::string second = harness_artifacts(c, o);
  r.seconds = since(t0);
  r.pass = second == first_run;
  r.detail = std::to_string(first_run.size()) + " bytes, " +
             (r.pass ? "identical" : "runs differ");
  return r;
}

// ---------------------------------------------------------------------------

bool HarnessReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& c) { return c.pass; });
}

std::string HarnessReport::table() const {
  std::string s;
  for (const auto& c : criteria) {
    char head[96];
    std::snprintf(head, sizeof head, "%d %-4s %-42s %8s  ", c.id, c.pass ? "PASS" : "FAIL",
                  c.title.c_str(), fmt_seconds(c.seconds).c_str());
    s += head + c.detail + "\n";
  }
  return s;
}

std::string HarnessReport::json() const {
  ojson j = ojson::array();
  for (const auto& c : criteria) {
    ojson x;
    x["id"] = c.id;
    x["title"] = c.title;
    x["pass"] = c.pass;
    x["detail"] = c.detail;
    x["seconds"] = c.seconds;
    j.push_back(std::move(x));
  }
  ojson root;
  root["criteria"] = std::move(j);
  root["pass"] = all_pass();
  return root.dump(2) + "\n";
}

HarnessReport run_harness(const Corpus& c, const HarnessOptions& o) {
  HarnessReport rep;
  if (c.programs.empty()) return rep;
  std::vector<CompositionReport> reports;
  rep.criteria.push_back(criterion_example());
  rep.criteria.push_back(criterion_compositionality(c, o, &reports));
  rep.criteria.push_back(criterion_correctness(c));
  rep.criteria.push_back(criterion_eta_laws(o));
  rep.criteria.push_back(criterion_variable_sets(c));
  rep.criteria.push_back(criterion_entailment(c, o));
  rep.criteria.push_back(criterion_domain(c, reports));
  rep.artifacts = harness_artifacts(c, o, &reports);
  rep.criteria.push_back(criterion_determinism(c, o, rep.artifacts));
  return rep;
}

}  // namespace chrsem
