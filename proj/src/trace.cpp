#include "chrsem/trace.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

namespace chrsem {

namespace {

std::uint32_t max_user_index(const AtomMultiset& g) {
  std::uint32_t m = 0;
  for (const auto& [a, n] : g.entries())
    if (a.is_user() && a.index) m = std::max(m, *a.index);
  return m;
}

VarSet vars_of(const Store& s) { return free_vars(s); }

}  // namespace

AtomMultiset initial_goal(const Goal& g) {
  AtomMultiset m;
  for (const auto& a : g.items) m.add(a.with_index(0));
  return m;
}

std::vector<CompTransition> comp_step(const CompConfig& cfg, const Program& prog, VarId block,
                                      const std::vector<Atom>& pool, bool assumptions) {
  if (!prog.simplification_only())
    throw std::invalid_argument("the trace engine accepts simplification rules only");
  std::vector<CompTransition> out;
  if (cfg.store.inconsistent()) return out;
  std::set<std::string> seen;

  for (const auto& [a, n] : cfg.goal.entries()) {
    if (!a.is_builtin()) continue;
    CompTransition t;
    t.rule = "solve";
    t.next.goal = cfg.goal;
    t.next.goal.remove(a);
    t.next.store = solve(cfg.store, BuiltinFormula::from_items(std::span<const Atom>(&a, 1)));
    out.push_back(std::move(t));
  }

  std::vector<Atom> users;
  for (const auto& [a, n] : cfg.goal.entries())
    if (a.is_user())
      for (std::size_t i = 0; i < n; ++i) users.push_back(a);
  if (users.empty()) return out;
  VarSet busy = set_union(free_vars(cfg.goal), vars_of(cfg.store));
  std::uint32_t body_index = max_user_index(cfg.goal) + 1;

  for (const auto& rule0 : prog.rules) {
    Rule rule = rename_rule(rule0, block);
    VarSet rv = rule.vars();
    if (!disjoint(rv, busy)) continue;
    const std::size_t m = rule.head.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
      bool full = mask == (std::size_t{1} << m) - 1;
      if (!assumptions && !full) continue;
      std::vector<std::size_t> matched, assumed;
      for (std::size_t i = 0; i < m; ++i) ((mask >> i) & 1 ? matched : assumed).push_back(i);

      // Injective choice of goal occurrences for the matched head atoms.
      std::vector<std::size_t> pick(matched.size());
      std::vector<bool> used(users.size(), false);
      // Choice per assumed atom: -1 = most general, otherwise pool index.
      std::vector<int> choice(assumed.size());

      auto emit = [&] {
        BuiltinFormula eqs;
        for (std::size_t i = 0; i < matched.size(); ++i) {
          const Atom& h = rule.head[matched[i]];
          const Atom& g = users[pick[i]];
          for (std::size_t a = 0; a < h.args.size(); ++a) eqs.eqs.push_back({h.args[a], g.args[a]});
        }
        AtomMultiset K, K_pool;
        for (std::size_t i = 0; i < assumed.size(); ++i) {
          const Atom& h = rule.head[assumed[i]];
          if (choice[i] < 0) {
            K.add(h);
            continue;
          }
          const Atom& p = pool[static_cast<std::size_t>(choice[i])];
          for (std::size_t a = 0; a < h.args.size(); ++a) eqs.eqs.push_back({h.args[a], p.args[a]});
          K.add(p.unindexed());
          K_pool.add(p.unindexed());
        }
        if (!entails_exists(cfg.store, rv, eqs, rule.guard).holds) return;
        CompTransition t;
        t.rule = rule.name;
        t.next.store = solve(cfg.store, eqs);
        t.next.goal = cfg.goal;
        for (std::size_t i = 0; i < matched.size(); ++i) t.next.goal.remove(users[pick[i]]);
        for (const auto& b : rule.body) t.next.goal.add(b.with_index(body_index));
        t.K = std::move(K);
        t.K_pool = std::move(K_pool);
        std::string key = rule.name + "|" + raw_string(t.K) + "|" + raw_string(t.K_pool) + "|" +
                          raw_string(t.next.goal) + "|" + raw_key(t.next.store);
        if (seen.insert(key).second) out.push_back(std::move(t));
      };

      std::function<void(std::size_t)> choose = [&](std::size_t i) {
        if (i == assumed.size()) {
          emit();
          return;
        }
        choice[i] = -1;
        choose(i + 1);
        const Atom& h = rule.head[assumed[i]];
        for (std::size_t p = 0; p < pool.size(); ++p) {
          if (pool[p].pred != h.pred || pool[p].args.size() != h.args.size()) continue;
          choice[i] = static_cast<int>(p);
          choose(i + 1);
        }
      };
      std::function<void(std::size_t)> match = [&](std::size_t i) {
        if (i == matched.size()) {
          choose(0);
          return;
        }
        const Atom& h = rule.head[matched[i]];
        for (std::size_t j = 0; j < users.size(); ++j) {
          if (used[j] || users[j].pred != h.pred || users[j].args.size() != h.args.size()) continue;
          used[j] = true;
          pick[i] = j;
          match(i + 1);
          used[j] = false;
        }
      };
      match(0);
    }
  }
  return out;
}

VarSet step_vars(const ConcreteStep& t) {
  VarSet s = free_vars(t.G);
  for (const auto& x : {free_vars(t.c), free_vars(t.K), free_vars(t.G2), free_vars(t.d)})
    s.insert(x.begin(), x.end());
  return s;
}

VarSet local_vars(const ConcreteStep& t) {
  VarSet out = set_union(free_vars(t.G2), free_vars(t.d));
  VarSet in = set_union(set_union(free_vars(t.G), free_vars(t.c)), free_vars(t.K));
  return set_minus(out, in);
}

ConcreteVarSets var_sets_concrete(const ConcreteSequence& delta) {
  ConcreteVarSets v;
  const auto& st = delta.steps;
  for (std::size_t i = 0; i + 1 < st.size(); ++i) {
    auto l = local_vars(st[i]);
    v.loc.insert(l.begin(), l.end());
    auto a = free_vars(st[i].K);
    v.ass.insert(a.begin(), a.end());
    auto c = set_minus(free_vars(st[i].d), free_vars(st[i].c));
    v.constr.insert(c.begin(), c.end());
  }
  if (!st.empty()) v.stable = free_vars(st.back().G);
  return v;
}

namespace {

struct Tail {
  ConcreteSequence seq;
  VarSet loc, ass, stable;
  std::vector<VarSet> fv_c, fv_d;
};

Tail make_terminal(const AtomMultiset& G, const Store& c) {
  Tail t;
  t.seq.steps.push_back({G, c, {}, G, c, {}, ""});
  t.stable = free_vars(G);
  t.fv_c.push_back(free_vars(c));
  t.fv_d.push_back(t.fv_c.back());
  return t;
}

bool compatible(const ConcreteStep& t, const VarSet& t_vars, const VarSet& t_loc, const Tail& tail) {
  const ConcreteStep& first = tail.seq.steps.front();
  if (!implies(first.c, t.d)) return false;
  if (!disjoint(tail.loc, t_vars)) return false;
  if (!disjoint(t_loc, tail.ass)) return false;
  VarSet acc = free_vars(t.d);
  for (std::size_t i = 0; i < tail.fv_c.size(); ++i) {
    for (auto v : set_intersect(t_loc, tail.fv_c[i]))
      if (!acc.count(v) && !tail.stable.count(v)) return false;
    acc.insert(tail.fv_d[i].begin(), tail.fv_d[i].end());
  }
  return true;
}

Tail prepend(const ConcreteStep& t, const VarSet& t_loc, const Tail& tail) {
  Tail r;
  r.seq.steps.reserve(tail.seq.steps.size() + 1);
  r.seq.steps.push_back(t);
  r.seq.steps.insert(r.seq.steps.end(), tail.seq.steps.begin(), tail.seq.steps.end());
  r.loc = set_union(t_loc, tail.loc);
  r.ass = set_union(free_vars(t.K), tail.ass);
  r.stable = tail.stable;
  r.fv_c.push_back(free_vars(t.c));
  r.fv_c.insert(r.fv_c.end(), tail.fv_c.begin(), tail.fv_c.end());
  r.fv_d.push_back(free_vars(t.d));
  r.fv_d.insert(r.fv_d.end(), tail.fv_d.begin(), tail.fv_d.end());
  return r;
}

using TailList = std::shared_ptr<const std::vector<Tail>>;

class Enumerator {
 public:
  Enumerator(const Program& p, const TraceOptions& o, VarId base, VarId stride)
      : prog_(p), opts_(o), base_(base), stride_(stride) {
    own_end_ = base_ + static_cast<VarId>(opts_.depth + 2) * stride_;
  }

  // Sequences for goal G whose first tuple sits at position k (1-based) with
  // input store c, after `used` partner steps have been consumed.
  TailList from(const AtomMultiset& G, const Store& c, int k, int used) {
    std::string key = raw_string(G) + "|" + raw_key(c) + "|" + std::to_string(k) + "|" +
                      std::to_string(used);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    auto out = std::make_shared<std::vector<Tail>>();
    out->push_back(make_terminal(G, c));
    if (!c.inconsistent()) {
      CompConfig cfg{G, c};
      auto trans = comp_step(cfg, prog_, block(k), opts_.pool, opts_.assumptions);
      if (k + 1 + used > opts_.depth) {
        if (!trans.empty()) truncated = true;
      } else {
        for (const auto& tr : trans) {
          ConcreteStep step{G, c, tr.K, tr.next.goal, tr.next.store, tr.K_pool, tr.rule};
          VarSet t_vars = step_vars(step);
          VarSet t_loc = local_vars(step);
          for (const auto& [c2, u2] : inputs(&step.d, k + 1, used)) {
            TailList tails = from(step.G2, c2, k + 1, u2);
            for (const auto& tail : *tails)
              if (compatible(step, t_vars, t_loc, tail)) out->push_back(prepend(step, t_loc, tail));
          }
        }
      }
    }
    memo_.emplace(key, out);
    return out;
  }

  // Input stores for position k: the previous output d (or true at k = 1)
  // and every admissible strengthening, with the partner steps consumed.
  std::vector<std::pair<Store, int>> inputs(const Store* d, int k, int used) const {
    Store base = d ? *d : Store::top();
    std::vector<std::pair<Store, int>> r{{base, used}};
    std::set<std::string> seen{raw_key(base)};
    for (std::size_t i = 0; i < opts_.strengthen.size(); ++i) {
      const Store& s = opts_.strengthen[i];
      int q = used + 1;
      if (i < opts_.strengthen_at.size()) {
        q = -1;
        for (int pos : opts_.strengthen_at[i])
          if (pos > used) {
            q = pos;
            break;
          }
        if (q < 0) continue;
      }
      if (k + q > opts_.depth) continue;
      if (s.inconsistent() || (d && !implies(s, *d)) || !own_vars_ok(s, k)) continue;
      if (!seen.insert(raw_key(s)).second) continue;
      r.emplace_back(s, q);
    }
    return r;
  }

  bool truncated = false;

 private:
  VarId block(int k) const { return base_ + static_cast<VarId>(k) * stride_; }

  // A strengthened input at position k may mention this side's variables only
  // from blocks of earlier positions.
  bool own_vars_ok(const Store& s, int k) const {
    for (auto v : free_vars(s))
      if (v >= block(k) && v < own_end_) return false;
    return true;
  }

  const Program& prog_;
  const TraceOptions& opts_;
  VarId base_;
  VarId stride_;
  VarId own_end_;
  std::map<std::string, TailList> memo_;
};

}  // namespace

TraceSet enumerate_sprime(const Program& prog, const Goal& goal, const TraceOptions& opts) {
  if (opts.depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (!prog.simplification_only())
    throw std::invalid_argument("the trace engine accepts simplification rules only");
  TraceSet res;
  res.stride = static_cast<VarId>(prog.max_rule_vars() + 1);
  VarId top = std::max<VarId>(max_var(std::span<const Atom>(goal.items)), 0);
  for (auto v : goal.vars) top = std::max(top, v);
  res.base = opts.var_base ? opts.var_base : top + 1;
  Enumerator e(prog, opts, res.base, res.stride);
  AtomMultiset g0 = initial_goal(goal);
  for (const auto& [c, used] : e.inputs(nullptr, 1, 0)) {
    auto tails = e.from(g0, c, 1, used);
    for (const auto& t : *tails) res.sequences.push_back(t.seq);
  }
  res.truncated = e.truncated;
  return res;
}

bool is_compatible(const ConcreteStep& t, const ConcreteSequence& delta) {
  if (delta.steps.empty()) return false;
  Tail tail;
  tail.seq = delta;
  auto vs = var_sets_concrete(delta);
  tail.loc = vs.loc;
  tail.ass = vs.ass;
  tail.stable = vs.stable;
  for (const auto& s : delta.steps) {
    tail.fv_c.push_back(free_vars(s.c));
    tail.fv_d.push_back(free_vars(s.d));
  }
  return compatible(t, step_vars(t), local_vars(t), tail);
}

std::optional<std::string> validate_sequence(const ConcreteSequence& delta) {
  const auto& st = delta.steps;
  if (st.empty()) return "empty sequence";
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto& s = st[i];
    bool last = i + 1 == st.size();
    if (last) {
      if (!s.K.empty() || !(s.G == s.G2) || !equivalent(s.c, s.d))
        return "tuple " + std::to_string(i + 1) + ": last tuple is not terminal";
      continue;
    }
    if (s.c.inconsistent()) return "tuple " + std::to_string(i + 1) + ": step out of false";
    if (!(s.G2 == st[i + 1].G)) return "tuple " + std::to_string(i + 1) + ": goals not chained";
    if (!implies(st[i + 1].c, s.d))
      return "tuple " + std::to_string(i + 2) + ": input store weaker than previous output";
  }
  return std::nullopt;
}

std::string to_string(const ConcreteStep& t) {
  return "<" + to_string(t.G) + ", " + to_string(t.c) + ", " + to_string(t.K) + ", " +
         to_string(t.G2) + ", " + to_string(t.d) + ">";
}

std::string to_string(const ConcreteSequence& delta) {
  std::string s;
  for (const auto& t : delta.steps) s += to_string(t) + "\n";
  return s;
}

}  // namespace chrsem
