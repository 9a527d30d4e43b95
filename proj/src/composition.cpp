#include "chrsem/composition.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace chrsem {

namespace {

std::string raw_tuple_key(const AbstractTuple& t) {
  return raw_key(t.c) + "|" + raw_string(t.K) + "|" + raw_string(t.H) + "|" + raw_key(t.d) + "|" +
         raw_string(t.K_pool);
}

std::string raw_seq_key(const AbstractSequence& s, bool with_pool) {
  std::string k;
  for (const auto& t : s.tuples) {
    if (with_pool) {
      k += raw_tuple_key(t);
    } else {
      k += raw_key(t.c) + "|" + raw_string(t.K) + "|" + raw_string(t.H) + "|" + raw_key(t.d);
    }
    k += "#";
  }
  return k;
}

}  // namespace

IndexedStableView indexed_stable(const AbstractSequence& s) {
  IndexedStableView v;
  for (std::size_t i = 0; i < s.tuples.size(); ++i) {
    auto idx = static_cast<std::uint32_t>(i + 1);
    if (i == 0) {
      v.H.push_back(s.tuples[0].H.with_index(idx));
    } else {
      AtomMultiset fresh = mdiff(s.tuples[i].H, s.tuples[i - 1].H, false);
      v.H.push_back(v.H.back() + fresh.with_index(idx));
    }
  }
  return v;
}

AbstractSequence seq_minus(const AbstractSequence& s, const AtomMultiset& W) {
  IndexedStableView v = indexed_stable(s);
  if (!v.H.empty() && !W.subset_of(v.H.back()))
    throw std::invalid_argument("atoms to remove are not indexed stable atoms of the sequence");
  AbstractSequence r = s;
  for (std::size_t i = 0; i < r.tuples.size(); ++i)
    r.tuples[i].H = mdiff(v.H[i], W, true).strip_indexes();
  return r;
}

bool dischargeable(const Store& c, const Atom& a, const Atom& b) {
  if (!a.is_user() || !b.is_user()) return false;
  if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
  if (c.inconsistent()) return true;
  BuiltinFormula eqs;
  for (std::size_t i = 0; i < a.args.size(); ++i) eqs.eqs.push_back({a.args[i], b.args[i]});
  return entails_exists(c, {}, eqs, BuiltinFormula::truth()).holds;
}

namespace {

// One discharge of assumption `a` at tuple i against indexed stable atom b.
AbstractSequence discharge(const AbstractSequence& s, std::size_t i, const Atom& a, const Atom& b) {
  AbstractSequence r = s;
  r.tuples[i].K.remove(a);
  r.tuples[i].K_pool.remove(a);
  AtomMultiset W;
  W.add(b);
  return seq_minus(r, W);
}

}  // namespace

std::vector<Composed> eta_with_certificates(const Composed& start) {
  std::vector<Composed> out;
  std::unordered_set<std::string> seen;
  std::deque<Composed> queue;
  seen.insert(raw_seq_key(start.seq, true));
  queue.push_back(start);
  while (!queue.empty()) {
    Composed cur = std::move(queue.front());
    queue.pop_front();
    const auto& ts = cur.seq.tuples;
    IndexedStableView v = indexed_stable(cur.seq);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (const auto& [a, na] : ts[i].K.entries()) {
        for (const auto& [b, nb] : v.H[i].entries()) {
          if (!dischargeable(ts[i].c, a, b)) continue;
          Composed next{discharge(cur.seq, i, a, b), cur.cert};
          next.cert.discharges.push_back({i + 1, a, b, ts[i].c});
          if (seen.insert(raw_seq_key(next.seq, true)).second) queue.push_back(std::move(next));
        }
      }
    }
    out.push_back(std::move(cur));
  }
  return out;
}

std::vector<AbstractSequence> eta(const std::vector<AbstractSequence>& S) {
  std::vector<AbstractSequence> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : S)
    for (auto& c : eta_with_certificates({s, {}}))
      if (seen.insert(raw_seq_key(c.seq, false)).second) out.push_back(std::move(c.seq));
  return out;
}

bool hygienic(const AbstractSequence& s1, const AbstractSequence& s2) {
  VarSet g1 = s1.goal.free_vars(), g2 = s2.goal.free_vars();
  VarSet a = set_union(var_sets_abstract(s1).loc, g1);
  VarSet b = set_union(var_sets_abstract(s2).loc, g2);
  return set_intersect(a, b) == set_intersect(g1, g2);
}

namespace {

using Suffix = std::pair<std::vector<AbstractTuple>, std::string>;

class Interleaver {
 public:
  Interleaver(const AbstractSequence& s1, const AbstractSequence& s2, const InterleaveOptions& o)
      : a_(s1.tuples), b_(s2.tuples), opts_(o) {}

  const std::vector<Suffix>& from(std::size_t i, std::size_t j) {
    auto key = std::make_pair(i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Suffix> out;
    bool last_a = i + 1 == a_.size(), last_b = j + 1 == b_.size();
    if (last_a && last_b) {
      if (equivalent(a_[i].c, b_[j].c))
        out.push_back({{{a_[i].c, {}, a_[i].H + b_[j].H, a_[i].c, {}}}, ""});
    } else {
      if (!last_a) prefix(a_[i], b_[j].H, from(i + 1, j), '1', out);
      if (!last_b) prefix(b_[j], a_[i].H, from(i, j + 1), '2', out);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  void prefix(const AbstractTuple& t, const AtomMultiset& other_H, const std::vector<Suffix>& tails,
              char side, std::vector<Suffix>& out) {
    AbstractTuple head = t;
    head.H = t.H + other_H;
    for (const auto& [tail, word] : tails) {
      const Store& next_c = tail.front().c;
      bool ok = opts_.chained ? equivalent(next_c, t.d) : implies(next_c, t.d);
      if (!ok || !head.H.subset_of(tail.front().H)) continue;
      std::vector<AbstractTuple> seq;
      seq.reserve(tail.size() + 1);
      seq.push_back(head);
      seq.insert(seq.end(), tail.begin(), tail.end());
      out.push_back({std::move(seq), side + word});
    }
  }

  const std::vector<AbstractTuple>& a_;
  const std::vector<AbstractTuple>& b_;
  const InterleaveOptions& opts_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Suffix>> memo_;
};

}  // namespace

std::vector<Composed> interleave(const AbstractSequence& s1, const AbstractSequence& s2,
                                 const InterleaveOptions& opts) {
  if (!hygienic(s1, s2)) throw std::invalid_argument("sequences are not renamed apart");
  std::vector<Composed> out;
  if (s1.tuples.empty() || s2.tuples.empty()) return out;
  Goal g = combine(s1.goal, s2.goal);
  Interleaver il(s1, s2, opts);
  for (const auto& [tuples, word] : il.from(0, 0)) {
    if (opts.chained && !tuples.front().c.is_true()) continue;
    Composed c;
    c.seq.tuples = tuples;
    c.seq.goal = g;
    c.cert.interleaving = word;
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<AbstractSequence> merge_by(const AbstractSequence& s1, const AbstractSequence& s2,
                                         const std::string& interleaving) {
  const auto& a = s1.tuples;
  const auto& b = s2.tuples;
  if (a.empty() || b.empty()) return std::nullopt;
  AbstractSequence r;
  r.goal = combine(s1.goal, s2.goal);
  std::size_t i = 0, j = 0;
  for (char ch : interleaving) {
    if (ch == '1' && i + 1 < a.size()) {
      AbstractTuple t = a[i];
      t.H = a[i].H + b[j].H;
      r.tuples.push_back(std::move(t));
      ++i;
    } else if (ch == '2' && j + 1 < b.size()) {
      AbstractTuple t = b[j];
      t.H = a[i].H + b[j].H;
      r.tuples.push_back(std::move(t));
      ++j;
    } else {
      return std::nullopt;
    }
  }
  if (i + 1 != a.size() || j + 1 != b.size()) return std::nullopt;
  r.tuples.push_back({a[i].c, {}, a[i].H + b[j].H, a[i].c, {}});
  return r;
}

bool replay_certificate(const AbstractSequence& s1, const AbstractSequence& s2,
                        const CompositionCertificate& cert, const AbstractSequence& result) {
  auto cur = merge_by(s1, s2, cert.interleaving);
  if (!cur) return false;
  for (const auto& dis : cert.discharges) {
    if (dis.tuple < 1 || dis.tuple > cur->tuples.size()) return false;
    std::size_t i = dis.tuple - 1;
    const auto& t = cur->tuples[i];
    if (!(t.c == dis.at) || !t.K.contains(dis.assumption)) return false;
    if (!indexed_stable(*cur).H[i].contains(dis.stable)) return false;
    if (!dischargeable(t.c, dis.assumption, dis.stable)) return false;
    *cur = discharge(*cur, i, dis.assumption, dis.stable);
  }
  return canonical_string(*cur) == canonical_string(result);
}

bool composition_side_conditions(const AbstractSequence& sigma, const VarSet& loc12) {
  if (!disjoint(loc12, var_sets_abstract(sigma).ass)) return false;
  VarSet outs;
  for (const auto& t : sigma.tuples) {
    for (auto v : set_intersect(loc12, free_vars(t.c)))
      if (!outs.count(v) && !free_vars(t.H).count(v)) return false;
    auto d = free_vars(t.d);
    outs.insert(d.begin(), d.end());
  }
  return true;
}

namespace {

// eta(s1 || s2) filtered by the set-level conditions. Membership in D is
// enforced while interleaving. `accept` may further restrict the members
// (the checker's slice).
void compose_pair(const AbstractSequence& s1, const AbstractSequence& s2, std::size_t left,
                  std::size_t right, const InterleaveOptions& opts,
                  const std::function<bool(const AbstractSequence&)>& accept,
                  std::map<std::string, Composed>& out) {
  if (!hygienic(s1, s2)) return;
  VarSet loc12 = set_union(var_sets_abstract(s1).loc, var_sets_abstract(s2).loc);
  for (auto& merged : interleave(s1, s2, opts)) {
    merged.cert.left = left;
    merged.cert.right = right;
    for (auto& c : eta_with_certificates(merged)) {
      if (!composition_side_conditions(c.seq, loc12)) continue;
      if (accept && !accept(c.seq)) continue;
      out.emplace(canonical_string(c.seq), std::move(c));
    }
  }
}

}  // namespace

std::vector<Composed> compose_sets(const std::vector<AbstractSequence>& S1,
                                   const std::vector<AbstractSequence>& S2,
                                   const InterleaveOptions& opts) {
  std::map<std::string, Composed> acc;
  for (std::size_t i = 0; i < S1.size(); ++i)
    for (std::size_t j = 0; j < S2.size(); ++j) compose_pair(S1[i], S2[j], i, j, opts, {}, acc);
  std::vector<Composed> out;
  for (auto& [k, c] : acc) out.push_back(std::move(c));
  return out;
}

namespace {

VarId goal_top(const Goal& g) {
  VarId m = max_var(std::span<const Atom>(g.items));
  for (auto v : g.vars) m = std::max(m, v);
  return m;
}

struct Harvest {
  // Output store -> positions of the steps producing it.
  std::map<std::string, std::pair<Store, std::set<int>>> stores;
  std::map<std::string, Atom> atoms;

  bool operator==(const Harvest& o) const {
    if (stores.size() != o.stores.size() || atoms.size() != o.atoms.size()) return false;
    for (auto a = stores.begin(), b = o.stores.begin(); a != stores.end(); ++a, ++b)
      if (a->first != b->first || a->second.second != b->second.second) return false;
    for (auto a = atoms.begin(), b = o.atoms.begin(); a != atoms.end(); ++a, ++b)
      if (a->first != b->first) return false;
    return true;
  }

  void feed(TraceOptions& o) const {
    o.strengthen.clear();
    o.strengthen_at.clear();
    o.pool.clear();
    for (const auto& [k, sp] : stores) {
      o.strengthen.push_back(sp.first);
      o.strengthen_at.emplace_back(sp.second.begin(), sp.second.end());
    }
    for (const auto& [k, a] : atoms) o.pool.push_back(a);
  }
};

Harvest harvest(const TraceSet& ts) {
  Harvest h;
  for (const auto& seq : ts.sequences) {
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
      const auto& st = seq.steps[i];
      if (!st.terminal()) {
        auto& slot = h.stores.try_emplace(raw_key(st.d), st.d, std::set<int>{}).first->second;
        slot.second.insert(static_cast<int>(i + 1));
      }
      for (const auto& [a, n] : st.G.entries()) {
        if (!a.is_user()) continue;
        Atom u = a.unindexed();
        h.atoms.try_emplace(raw_string(u), u);
      }
    }
  }
  return h;
}

std::vector<AbstractSequence> abstract_all(const TraceSet& ts, const Goal& g) {
  std::vector<AbstractSequence> out;
  out.reserve(ts.sequences.size());
  for (const auto& s : ts.sequences) {
    if (auto err = validate_sequence(s))
      throw std::logic_error("enumerated sequence is malformed: " + *err);
    out.push_back(alpha(s, g));
  }
  return out;
}

}  // namespace

CompositionReport check_compositionality(const Program& prog, const Goal& g1, const Goal& g2,
                                         const CompositionOptions& opts) {
  if (opts.depth < 1) throw std::invalid_argument("depth must be at least 1");
  CompositionReport rep;
  const int L = opts.depth;
  Goal g12 = combine(g1, g2);
  auto stride = static_cast<VarId>(prog.max_rule_vars() + 1);
  VarId span = static_cast<VarId>(L + 3) * stride;
  VarId base_lhs = goal_top(g12) + 1 + opts.seed;
  VarId base1 = base_lhs + span;
  VarId base2 = base1 + span;

  // Left-hand side: traces of the conjoined goal, most general assumptions.
  TraceOptions lo;
  lo.depth = L;
  lo.var_base = base_lhs;
  for (const auto& s : abstract_all(enumerate_sprime(prog, g12, lo), g12))
    rep.lhs.insert(canonical_string(s));

  // Components: harvest partner output stores and goal atoms until stable.
  TraceOptions o1, o2;
  o1.depth = o2.depth = L;
  o1.var_base = base1;
  o2.var_base = base2;
  TraceSet t1 = enumerate_sprime(prog, g1, o1);
  TraceSet t2 = enumerate_sprime(prog, g2, o2);
  Harvest h1 = harvest(t1), h2 = harvest(t2);
  rep.rounds = 1;
  bool converged = false;
  for (int round = 0; round < L + 1; ++round) {
    h2.feed(o1);
    h1.feed(o2);
    t1 = enumerate_sprime(prog, g1, o1);
    t2 = enumerate_sprime(prog, g2, o2);
    ++rep.rounds;
    Harvest n1 = harvest(t1), n2 = harvest(t2);
    if (n1 == h1 && n2 == h2) {
      converged = true;
      break;
    }
    h1 = std::move(n1);
    h2 = std::move(n2);
  }
  rep.truncated = !converged;

  auto S1 = abstract_all(t1, g1);
  auto S2 = abstract_all(t2, g2);
  std::map<std::string, std::vector<std::size_t>> by_store;
  for (std::size_t j = 0; j < S2.size(); ++j) by_store[raw_key(store(S2[j]))].push_back(j);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < S1.size(); ++i) {
    const auto& a = S1[i];
    auto it = by_store.find(raw_key(store(a)));
    if (it == by_store.end()) continue;
    bool a_true = instore(a).is_true();
    for (auto j : it->second) {
      const auto& b = S2[j];
      if (a.size() + b.size() - 1 > static_cast<std::size_t>(L)) continue;
      if (!a_true && !instore(b).is_true()) continue;
      pairs.emplace_back(i, j);
    }
  }
  rep.pairs = pairs.size();

  InterleaveOptions io;
  io.chained = true;
  auto no_partner_assumptions = [](const AbstractSequence& s) {
    for (const auto& t : s.tuples)
      if (!t.K_pool.empty()) return false;
    return true;
  };
  int jobs = std::max(1, opts.jobs);
  std::vector<std::map<std::string, Composed>> partial(static_cast<std::size_t>(jobs));
  auto work = [&](int w) {
    for (std::size_t p = static_cast<std::size_t>(w); p < pairs.size();
         p += static_cast<std::size_t>(jobs)) {
      auto [i, j] = pairs[p];
      compose_pair(S1[i], S2[j], i, j, io, no_partner_assumptions,
                   partial[static_cast<std::size_t>(w)]);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  // Deterministic merge: for each canonical string keep the witness of the
  // smallest (left, right) pair, whatever thread found it.
  std::map<std::string, Composed> rhs;
  for (auto& part : partial)
    for (auto& [k, c] : part) {
      auto it = rhs.find(k);
      if (it == rhs.end()) {
        rhs.emplace(k, std::move(c));
      } else if (std::tie(c.cert.left, c.cert.right, c.cert.interleaving) <
                 std::tie(it->second.cert.left, it->second.cert.right,
                          it->second.cert.interleaving)) {
        it->second = std::move(c);
      }
    }
  for (auto& [k, c] : rhs) {
    rep.rhs.insert(k);
    rep.witnesses.push_back(std::move(c));
  }
  std::set_difference(rep.lhs.begin(), rep.lhs.end(), rep.rhs.begin(), rep.rhs.end(),
                      std::inserter(rep.only_lhs, rep.only_lhs.end()));
  std::set_difference(rep.rhs.begin(), rep.rhs.end(), rep.lhs.begin(), rep.lhs.end(),
                      std::inserter(rep.only_rhs, rep.only_rhs.end()));
  return rep;
}

}  // namespace chrsem
