#include "doctest.h"

#include "chrsem/observables.hpp"
#include "util.hpp"

using namespace chrsem;
using testutil::atoms;
using testutil::store;

namespace {

const char* kGh = "gh @ g(X), h(Y) <=> true | X = Y.";

AbstractTuple tup(Store c, AtomMultiset K, AtomMultiset H, Store d) {
  return AbstractTuple{std::move(c), std::move(K), std::move(H), std::move(d), {}};
}

}  // namespace

TEST_CASE("connectedness clauses") {
  GoalScope sc;
  Goal g = parse_goal("g(U)", sc);
  Store ua = store("U = a", sc);

  AbstractSequence ok{{tup(Store::top(), {}, {}, ua), tup(ua, {}, {}, ua)}, g};
  CHECK(is_connected(ok));

  AbstractSequence assumes{{tup(Store::top(), atoms("h(U)", sc), {}, ua), tup(ua, {}, {}, ua)}, g};
  auto f = is_connected(assumes);
  CHECK_FALSE(f);
  CHECK(f.clause == 1);
  CHECK(f.tuple == 1);

  Store both = store("U = a, V = b", sc);
  AbstractSequence jumps{{tup(Store::top(), {}, {}, ua), tup(both, {}, {}, both)}, g};
  f = is_connected(jumps);
  CHECK_FALSE(f);
  CHECK(f.clause == 2);

  AbstractSequence stuck{{tup(Store::top(), {}, atoms("g(U)", sc), Store::top())}, g};
  f = is_connected(stuck);
  CHECK_FALSE(f);
  CHECK(f.clause == 3);

  AbstractSequence failed{{tup(Store::top(), {}, atoms("g(U)", sc), Store::bottom()),
                           tup(Store::bottom(), {}, atoms("g(U)", sc), Store::bottom())},
                          g};
  CHECK(is_connected(failed));
}

TEST_CASE("data sufficient answers from connected traces") {
  Program p = parse_program(kGh);
  CHECK(sa_from_traces(p, parse_goal("g(U), h(V)"), 6).answers == std::set<std::string>{"U = V"});
  CHECK(sa_from_traces(p, parse_goal("g(U)"), 6).answers.empty());
}

TEST_CASE("traces and the standard engine agree") {
  const char* progs[] = {kGh, "p(N) <=> tok(N).\ntok(N), want(M) <=> N = M.",
                         "a(X), b(Y), c(Z) <=> X = Y, Y = Z.",
                         "s(X) <=> X = a.\ng(X) <=> X = a | true.",
                         "r @ a(X) <=> X = b."};
  const char* goals[] = {"g(U), h(V)", "p(U), want(V)", "a(U), b(V), c(W)", "g(U), s(U)",
                         "a(U), U = c"};
  for (int i = 0; i < 5; ++i) {
    auto r = check_correctness(parse_program(progs[i]), parse_goal(goals[i]), 6);
    INFO(goals[i]);
    CHECK(r.equal());
    CHECK_FALSE(r.lhs.empty());
  }
  CHECK_THROWS_AS(check_correctness(parse_program(kGh), parse_goal("g(U)"), 0),
                  std::invalid_argument);
}
