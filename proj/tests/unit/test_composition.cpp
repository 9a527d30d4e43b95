#include "doctest.h"

#include <algorithm>

#include "chrsem/composition.hpp"
#include "chrsem/harness.hpp"
#include "util.hpp"

using namespace chrsem;
using testutil::atoms;
using testutil::store;

namespace {

const char* kGh = "gh @ g(X), h(Y) <=> true | X = Y.";

AbstractTuple tup(Store c, AtomMultiset K, AtomMultiset H, Store d) {
  return AbstractTuple{std::move(c), std::move(K), std::move(H), std::move(d), {}};
}

std::set<std::string> keys(const std::vector<AbstractSequence>& S) {
  std::set<std::string> out;
  for (const auto& s : S) out.insert(canonical_string(s));
  return out;
}

CompositionReport check(const char* prog, const char* g1, const char* g2, int depth) {
  GoalScope sc;
  Goal a = parse_goal(g1, sc), b = parse_goal(g2, sc);
  CompositionOptions o;
  o.depth = depth;
  return check_compositionality(parse_program(prog), a, b, o);
}

}  // namespace

TEST_CASE("dischargeable needs the same predicate and entailed arguments") {
  GoalScope sc;
  Atom hu = testutil::atom("h(U)", sc), hv = testutil::atom("h(V)", sc),
       gv = testutil::atom("g(V)", sc);
  CHECK(dischargeable(store("U = V", sc), hu, hv));
  CHECK_FALSE(dischargeable(Store::top(), hu, hv));
  CHECK(dischargeable(Store::bottom(), hu, hv));
  CHECK_FALSE(dischargeable(store("U = V", sc), hu, gv));
}

TEST_CASE("eta discharges an assumption against a stable atom") {
  GoalScope sc;
  Goal g = parse_goal("g(U), h(V)", sc);
  Store uv = store("U = V", sc);
  AbstractSequence s;
  s.goal = g;
  s.tuples = {tup(uv, atoms("h(U)", sc), atoms("h(V)", sc), uv),
              tup(uv, {}, atoms("h(V)", sc), uv)};
  auto closed = eta({s});
  REQUIRE(closed.size() == 2);
  AbstractSequence expected = s;
  expected.tuples = {tup(uv, {}, {}, uv), tup(uv, {}, {}, uv)};
  CHECK(keys(closed).count(canonical_string(expected)) == 1);

  // Without the equation in the input store nothing is dischargeable.
  s.tuples = {tup(Store::top(), atoms("h(U)", sc), atoms("h(V)", sc), uv),
              tup(uv, {}, atoms("h(V)", sc), uv)};
  CHECK(eta({s}).size() == 1);
}

TEST_CASE("eta is extensive, idempotent and monotone on random sets") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 4);
  std::bernoulli_distribution keep(0.5);
  int grew = 0;
  for (int k = 0; k < 200; ++k) {
    std::vector<AbstractSequence> S, sub;
    for (int i = size(rng); i > 0; --i) {
      S.push_back(random_abstract_sequence(rng));
      if (keep(rng)) sub.push_back(S.back());
    }
    for (const auto& s : S) REQUIRE_FALSE(validate_domain(s));
    auto eS = eta(S);
    auto kS = keys(S), keS = keys(eS), kSub = keys(eta(sub));
    grew += keS.size() > kS.size();
    CHECK(std::includes(keS.begin(), keS.end(), kS.begin(), kS.end()));
    CHECK(keys(eta(eS)) == keS);
    CHECK(std::includes(keS.begin(), keS.end(), kSub.begin(), kSub.end()));
  }
  CHECK(grew > 10);
}

TEST_CASE("interleaving two idle sequences") {
  GoalScope sc;
  Goal g1 = parse_goal("g(U)", sc), g2 = parse_goal("h(V)", sc);
  AbstractSequence s1{{tup(Store::top(), {}, atoms("g(U)", sc), Store::top())}, g1};
  AbstractSequence s2{{tup(Store::top(), {}, atoms("h(V)", sc), Store::top())}, g2};
  auto out = interleave(s1, s2);
  REQUIRE(out.size() == 1);
  REQUIRE(out[0].seq.size() == 1);
  CHECK(out[0].seq.tuples[0].H.size() == 2);
  CHECK(out[0].seq.goal.vars.size() == 2);
}

TEST_CASE("interleave refuses pairs that share local variables") {
  GoalScope sc;
  Goal g1 = parse_goal("g(U)", sc), g2 = parse_goal("h(V)", sc);
  Store wa = store("W = a", sc);
  AbstractSequence s1{{tup(Store::top(), {}, {}, wa), tup(wa, {}, {}, wa)}, g1};
  AbstractSequence s2{{tup(Store::top(), {}, {}, wa), tup(wa, {}, {}, wa)}, g2};
  CHECK_FALSE(hygienic(s1, s2));
  CHECK_THROWS_AS(interleave(s1, s2), std::invalid_argument);
}

TEST_CASE("certificates replay, and tampered ones do not") {
  GoalScope sc;
  Goal g1 = parse_goal("g(U)", sc), g2 = parse_goal("h(U)", sc);
  AbstractSequence s1{{tup(Store::top(), atoms("h(U)", sc), {}, Store::top()),
                       tup(Store::top(), {}, {}, Store::top())},
                      g1};
  AbstractSequence s2{{tup(Store::top(), {}, atoms("h(U)", sc), Store::top())}, g2};
  auto out = compose_sets({s1}, {s2});
  REQUIRE_FALSE(out.empty());
  bool discharged = false;
  for (const auto& c : out) {
    CHECK(replay_certificate(s1, s2, c.cert, c.seq));
    if (!c.cert.discharges.empty()) {
      discharged = true;
      CHECK(c.seq.tuples[0].K.empty());
      CompositionCertificate bad = c.cert;
      bad.discharges.clear();
      CHECK_FALSE(replay_certificate(s1, s2, bad, c.seq));
    }
    CompositionCertificate swapped = c.cert;
    std::reverse(swapped.interleaving.begin(), swapped.interleaving.end());
    if (swapped.interleaving != c.cert.interleaving)
      CHECK_FALSE(replay_certificate(s1, s2, swapped, c.seq));
  }
  CHECK(discharged);
}

TEST_CASE("compositionality holds for the g/h program") {
  auto r = check(kGh, "g(U)", "h(V)", 4);
  CHECK(r.equal());
  CHECK_FALSE(r.truncated);
  CHECK_FALSE(r.lhs.empty());
  for (const auto& w : r.witnesses) CHECK_FALSE(validate_domain(w.seq));
  auto r5 = check(kGh, "g(U)", "h(V)", 5);
  CHECK(r5.equal());
  CHECK(r5.lhs.size() > r.lhs.size());
}

TEST_CASE("compositionality holds when the goals share a variable") {
  auto r = check("set @ s(X) <=> X = a.\ncheck @ g(X) <=> X = a | true.", "s(U)", "g(U)", 5);
  CHECK(r.equal());
  CHECK_FALSE(r.truncated);
}

TEST_CASE("a mutated rule breaks the comparison") {
  const char* mutant = "gh @ g(X), h(Y) <=> true | X = a.";
  auto orig = check(kGh, "g(U)", "h(V)", 4);
  auto mut = check(mutant, "g(U)", "h(V)", 4);
  CHECK(mut.equal());
  CHECK(mut.lhs != orig.rhs);
  std::vector<std::string> diff;
  std::set_symmetric_difference(mut.lhs.begin(), mut.lhs.end(), orig.rhs.begin(), orig.rhs.end(),
                                std::back_inserter(diff));
  CHECK_FALSE(diff.empty());
}

TEST_CASE("parallel and sequential checks agree") {
  GoalScope sc;
  Goal a = parse_goal("p(U)", sc), b = parse_goal("want(V)", sc);
  Program p = parse_program("p(N) <=> tok(N).\ntok(N), want(M) <=> N = M.");
  CompositionOptions o;
  o.depth = 4;
  auto seq = check_compositionality(p, a, b, o);
  o.jobs = 4;
  auto par = check_compositionality(p, a, b, o);
  CHECK(seq.lhs == par.lhs);
  CHECK(seq.rhs == par.rhs);
  CHECK(seq.equal());
}
