#include "chrsem/abstraction.hpp"

#include <algorithm>
#include <stdexcept>

namespace chrsem {

namespace {

AtomMultiset intersect(const AtomMultiset& a, const AtomMultiset& b) {
  AtomMultiset r;
  for (const auto& [x, n] : a.entries()) {
    std::size_t m = std::min(n, b.count(x));
    if (m) r.add(x, m);
  }
  return r;
}

}  // namespace

std::vector<AtomMultiset> suffix_stable_atoms(const ConcreteSequence& delta) {
  const auto& st = delta.steps;
  std::vector<AtomMultiset> H(st.size());
  for (std::size_t i = st.size(); i-- > 0;)
    H[i] = i + 1 == st.size() ? st[i].G : intersect(st[i].G, H[i + 1]);
  return H;
}

AtomMultiset stable_atoms(const ConcreteSequence& delta) {
  if (delta.steps.empty()) return {};
  return suffix_stable_atoms(delta).front();
}

AbstractSequence alpha(const ConcreteSequence& delta, const Goal& goal) {
  AbstractSequence s;
  s.goal = goal;
  auto H = suffix_stable_atoms(delta);
  for (std::size_t i = 0; i < delta.steps.size(); ++i) {
    const auto& t = delta.steps[i];
    s.tuples.push_back({t.c, t.K, H[i].strip_indexes(), t.d, t.K_pool});
  }
  return s;
}

AbstractVarSets var_sets_abstract(const AbstractSequence& sigma) {
  AbstractVarSets v;
  const auto& ts = sigma.tuples;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    auto a = free_vars(ts[i].K);
    v.ass.insert(a.begin(), a.end());
    auto c = set_minus(free_vars(ts[i].d), free_vars(ts[i].c));
    v.constr.insert(c.begin(), c.end());
  }
  if (!ts.empty()) v.stable = free_vars(ts.back().H);
  v.loc = set_minus(set_union(v.constr, v.stable), set_union(v.ass, sigma.goal.free_vars()));
  return v;
}

AbstractVarSets var_sets_of(const ConcreteSequence& delta, const Goal&) {
  auto c = var_sets_concrete(delta);
  return {c.ass, c.stable, c.constr, c.loc};
}

const Store& instore(const AbstractSequence& s) { return s.tuples.front().c; }
const Store& store(const AbstractSequence& s) { return s.tuples.back().d; }
const Store& instore(const ConcreteSequence& s) { return s.steps.front().c; }
const Store& store(const ConcreteSequence& s) { return s.steps.back().d; }

ConcreteSequence seq_plus(const ConcreteSequence& delta, const AtomMultiset& W) {
  ConcreteSequence r = delta;
  for (auto& t : r.steps) {
    t.G = t.G + W;
    t.G2 = t.G2 + W;
  }
  return r;
}

ConcreteSequence seq_minus(const ConcreteSequence& delta, const AtomMultiset& W) {
  if (!W.subset_of(stable_atoms(delta)))
    throw std::invalid_argument("atoms to remove are not stable in the sequence");
  ConcreteSequence r = delta;
  for (auto& t : r.steps) {
    t.G = mdiff(t.G, W, true);
    t.G2 = mdiff(t.G2, W, true);
  }
  return r;
}

std::optional<DomainViolation> validate_domain(const AbstractSequence& s) {
  const auto& ts = s.tuples;
  if (ts.empty()) return DomainViolation{0, "empty sequence"};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& t = ts[i];
    if (!implies(t.d, t.c)) return DomainViolation{i + 1, "output store does not imply input store"};
    if (i + 1 == ts.size()) {
      if (!t.K.empty()) return DomainViolation{i + 1, "last tuple has assumptions"};
      if (!equivalent(t.c, t.d)) return DomainViolation{i + 1, "last tuple changes the store"};
      continue;
    }
    if (!t.H.subset_of(ts[i + 1].H))
      return DomainViolation{i + 1, "stable atoms not included in the next tuple's"};
    if (!implies(ts[i + 1].c, t.d))
      return DomainViolation{i + 2, "input store does not imply the previous output"};
  }
  return std::nullopt;
}

Structure to_structure(const AbstractSequence& s) {
  Structure st;
  for (std::size_t i = 0; i < s.tuples.size(); ++i) {
    const auto& t = s.tuples[i];
    std::string n = std::to_string(i + 1);
    st.add_store("c" + n, t.c);
    st.add_atoms("K" + n, t.K);
    st.add_atoms("H" + n, t.H);
    st.add_store("d" + n, t.d);
  }
  return st;
}

std::string canonical_string(const AbstractSequence& s) {
  return canonical_string(to_structure(s), s.goal.vars);
}

std::string to_string(const AbstractSequence& s) {
  std::string r;
  for (const auto& t : s.tuples)
    r += "<" + to_string(t.c) + ", " + to_string(t.K) + ", " + to_string(t.H) + ", " +
         to_string(t.d) + ">\n";
  return r;
}

}  // namespace chrsem
