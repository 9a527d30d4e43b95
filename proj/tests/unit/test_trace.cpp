#include "doctest.h"

#include "chrsem/abstraction.hpp"
#include "chrsem/trace.hpp"
#include "util.hpp"

using namespace chrsem;

namespace {

const char* kGh = "gh @ g(X), h(Y) <=> true | X = Y.";

TraceSet traces(const char* prog, const Goal& g, int depth) {
  TraceOptions o;
  o.depth = depth;
  return enumerate_sprime(parse_program(prog), g, o);
}

const ConcreteSequence* find_len(const TraceSet& ts, std::size_t n) {
  for (const auto& s : ts.sequences)
    if (s.steps.size() == n) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("g(U) alone fires gh only by assuming h") {
  Goal g = parse_goal("g(U)");
  VarId u = g.vars[0];
  TraceSet ts = traces(kGh, g, 2);
  REQUIRE(ts.sequences.size() == 2);
  CHECK(ts.truncated);

  const ConcreteSequence* idle = find_len(ts, 1);
  REQUIRE(idle);
  CHECK(idle->steps[0].terminal());
  CHECK(idle->steps[0].c.is_true());

  const ConcreteSequence* fire = find_len(ts, 2);
  REQUIRE(fire);
  const ConcreteStep& t1 = fire->steps[0];
  CHECK(t1.rule == "gh");
  REQUIRE(t1.K.size() == 1);
  Atom assumed = t1.K.to_vector()[0];
  CHECK(assumed.pred == Symbol("h"));
  VarId y = assumed.args[0].var_id();
  // The head match binds the renamed X to U; the body equation is pending.
  REQUIRE(t1.d.bindings().size() == 1);
  VarId x = t1.d.bindings().begin()->first;
  CHECK(t1.d.bindings().begin()->second == Term::var(u));
  REQUIRE(t1.G2.size() == 1);
  Atom body = t1.G2.to_vector()[0];
  CHECK(body.is_equation());
  CHECK(body.index == std::optional<std::uint32_t>(1));
  CHECK(fire->steps[1].terminal());

  AbstractSequence a = alpha(*fire, g);
  REQUIRE(a.size() == 2);
  CHECK(a.tuples[0].K.size() == 1);
  CHECK(a.tuples[0].H.empty());
  CHECK(a.tuples[1].H.size() == 1);
  CHECK_FALSE(validate_domain(a));

  auto vs = var_sets_abstract(a);
  CHECK(vs.ass == VarSet{y});
  CHECK(vs.stable == (VarSet{x, y}));
  CHECK(vs.constr == (VarSet{u, x}));
  CHECK(vs.loc == VarSet{x});

  auto cs = var_sets_of(*fire, g);
  CHECK(cs.ass == vs.ass);
  CHECK(cs.stable == vs.stable);
  CHECK(cs.constr == vs.constr);
  CHECK(cs.loc == vs.loc);
}

TEST_CASE("one more step solves the body equation") {
  Goal g = parse_goal("g(U)");
  TraceSet ts = traces(kGh, g, 3);
  CHECK(ts.sequences.size() == 3);
  const ConcreteSequence* full = find_len(ts, 3);
  REQUIRE(full);
  CHECK(full->steps[1].rule == "solve");
  CHECK(full->steps[2].d.bindings().size() == 2);
}

TEST_CASE("without assumptions only whole heads fire") {
  Goal g = parse_goal("g(U)");
  TraceOptions o;
  o.depth = 4;
  o.assumptions = false;
  CHECK(enumerate_sprime(parse_program(kGh), g, o).sequences.size() == 1);
  Goal gh = parse_goal("g(U), h(V)");
  auto ts = enumerate_sprime(parse_program(kGh), gh, o);
  bool fired = false;
  for (const auto& s : ts.sequences) fired = fired || (s.steps[0].rule == "gh" && s.steps[0].K.empty());
  CHECK(fired);
}

TEST_CASE("every enumerated sequence is well formed and compatible") {
  const char* progs[] = {kGh, "p(N) <=> tok(N).\ntok(N), want(M) <=> N = M.",
                         "f(X) <=> l(X), m(X).\nl(X), m(Y) <=> X = Y."};
  const char* goals[] = {"g(U), h(V)", "p(U), want(V)", "f(U), m(V)"};
  for (int i = 0; i < 3; ++i) {
    Goal g = parse_goal(goals[i]);
    auto ts = traces(progs[i], g, 4);
    CHECK_FALSE(ts.sequences.empty());
    for (const auto& s : ts.sequences) {
      INFO(to_string(s));
      CHECK_FALSE(validate_sequence(s));
      for (std::size_t k = 0; k + 1 < s.steps.size(); ++k) {
        ConcreteSequence tail;
        tail.steps.assign(s.steps.begin() + k + 1, s.steps.end());
        CHECK(is_compatible(s.steps[k], tail));
      }
      CHECK_FALSE(validate_domain(alpha(s, g)));
    }
  }
}

TEST_CASE("comp_step rejects propagation rules") {
  Program p = parse_program("p(X) ==> q(X).");
  CompConfig cfg{initial_goal(parse_goal("p(U)")), Store::top()};
  CHECK_THROWS_AS(comp_step(cfg, p, 10, {}, true), std::invalid_argument);
}

TEST_CASE("stable atoms survive the whole sequence") {
  Goal g = parse_goal("g(U), k(W)");
  auto ts = traces(kGh, g, 2);
  for (const auto& s : ts.sequences) {
    auto st = stable_atoms(s).strip_indexes();
    GoalScope sc;
    CHECK(st.count(Atom::user(Symbol("k"), {Term::var(g.vars[1])})) == 1);
  }
}

TEST_CASE("adding and removing stable atoms") {
  Goal g = parse_goal("g(U)");
  auto ts = traces(kGh, g, 2);
  const ConcreteSequence* fire = find_len(ts, 2);
  REQUIRE(fire);
  AtomMultiset w{Atom::user(Symbol("k"), {Term::constant("a")}).with_index(0)};
  ConcreteSequence plus = seq_plus(*fire, w);
  for (const auto& t : plus.steps) CHECK(t.G.count(w.to_vector()[0]) == 1);
  ConcreteSequence back = seq_minus(plus, w);
  CHECK(to_string(back) == to_string(*fire));
  CHECK_THROWS_AS(seq_minus(*fire, w), std::invalid_argument);
}

TEST_CASE("domain violations name the tuple") {
  GoalScope sc;
  Goal g = parse_goal("g(U)", sc);
  AbstractSequence s;
  s.goal = g;
  AbstractTuple t1{Store::top(), {}, testutil::atoms("k(U)", sc), Store::top(), {}};
  AbstractTuple t2{Store::top(), {}, {}, Store::top(), {}};
  s.tuples = {t1, t2};
  auto v = validate_domain(s);
  REQUIRE(v);
  CHECK(v->tuple == 1);

  s.tuples = {AbstractTuple{testutil::store("U = a", sc), {}, {}, Store::top(), {}}, t2};
  v = validate_domain(s);
  REQUIRE(v);
  CHECK(v->tuple == 1);

  s.tuples = {AbstractTuple{Store::top(), testutil::atoms("h(U)", sc), {}, Store::top(), {}}};
  v = validate_domain(s);
  REQUIRE(v);
  CHECK(v->tuple == 1);

  s.tuples = {AbstractTuple{Store::top(), {}, {}, testutil::store("U = a", sc), {}},
              AbstractTuple{Store::top(), {}, {}, Store::top(), {}}};
  v = validate_domain(s);
  REQUIRE(v);
  CHECK(v->tuple == 2);
}

TEST_CASE("canonical strings ignore the names of local variables") {
  GoalScope sc;
  Goal g = parse_goal("g(U)", sc);
  auto make = [&](const char* local) {
    AbstractSequence s;
    s.goal = g;
    Store c = testutil::store(std::string("U = f(") + local + ")", sc);
    s.tuples = {AbstractTuple{c, {}, {}, c, {}}};
    return s;
  };
  CHECK(canonical_string(make("A")) == canonical_string(make("B")));
  AbstractSequence other = make("A");
  other.tuples[0].c = other.tuples[0].d = testutil::store("W = f(A)", sc);
  CHECK(canonical_string(other) != canonical_string(make("A")));
}
