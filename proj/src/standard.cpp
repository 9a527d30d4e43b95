#include "chrsem/standard.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "chrsem/canonical.hpp"

namespace chrsem {

namespace {

VarId default_base(const Goal& g) {
  VarId m = 0;
  for (auto v : g.vars) m = std::max(m, v);
  m = std::max(m, max_var(std::span<const Atom>(g.items)));
  return m + 1;
}

// Every injective assignment of head positions to candidate positions with a
// matching predicate; calls f with the chosen candidate index per head atom.
void for_each_matching(const std::vector<Atom>& head, const std::vector<Atom>& pool,
                       const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> pick(head.size());
  std::vector<bool> used(pool.size(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == head.size()) {
      f(pick);
      return;
    }
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (used[j] || pool[j].pred != head[i].pred || pool[j].args.size() != head[i].args.size())
        continue;
      used[j] = true;
      pick[i] = j;
      rec(i + 1);
      used[j] = false;
    }
  };
  rec(0);
}

std::vector<std::string> sorted_strings(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

const char* to_string(StdMove m) {
  switch (m) {
    case StdMove::Solve: return "solve";
    case StdMove::Introduce: return "introduce";
    case StdMove::Simplify: return "simplify";
    case StdMove::Propagate: return "propagate";
  }
  return "?";
}

AtomMultiset StdConfig::chr_atoms() const {
  AtomMultiset m;
  for (const auto& s : chr) m.add(s.atom);
  return m;
}

std::string StdConfig::key() const {
  std::string k;
  std::vector<std::string> g;
  for (const auto& a : goal) g.push_back(to_string(a));
  for (const auto& s : sorted_strings(g)) k += s + ";";
  k += "|";
  if (fired.empty()) {
    std::vector<std::string> c;
    for (const auto& s : chr) c.push_back(to_string(s.atom));
    for (const auto& s : sorted_strings(c)) k += s + ";";
  } else {
    for (const auto& s : chr) k += std::to_string(s.id) + ":" + to_string(s.atom) + ";";
    k += "|";
    for (const auto& [r, ids] : fired) {
      k += r;
      for (auto i : ids) k += "," + std::to_string(i);
      k += ";";
    }
  }
  k += "|" + raw_key(store) + "|" + std::to_string(rewrites);
  return k;
}

StdEngine::StdEngine(const Program& p, const Goal& g, StdOptions o)
    : program(p),
      options(o),
      base(o.var_base ? o.var_base : default_base(g)),
      stride(static_cast<VarId>(p.max_rule_vars() + 1)) {}

StdConfig StdEngine::initial(const Goal& g) const {
  StdConfig c;
  c.goal = g.items;
  c.store = Store::top();
  return c;
}

std::vector<StdSuccessor> StdEngine::step(const StdConfig& cfg) const {
  return std_step(cfg, program, options, base, stride);
}

std::vector<StdSuccessor> std_step(const StdConfig& cfg, const Program& prog,
                                   const StdOptions& opts, VarId base, VarId stride) {
  std::vector<StdSuccessor> out;
  if (cfg.failed()) return out;

  // Solve and Introduce, once per distinct goal item.
  for (std::size_t i = 0; i < cfg.goal.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) seen = seen || cfg.goal[j] == cfg.goal[i];
    if (seen) continue;
    StdConfig next = cfg;
    next.goal.erase(next.goal.begin() + static_cast<std::ptrdiff_t>(i));
    const Atom& item = cfg.goal[i];
    if (item.is_builtin()) {
      next.store = solve(cfg.store, BuiltinFormula::from_items(std::span<const Atom>(&item, 1)));
      out.push_back({StdMove::Solve, "", std::move(next)});
    } else {
      next.chr.push_back({next.next_atom_id++, item});
      out.push_back({StdMove::Introduce, "", std::move(next)});
    }
  }

  std::vector<Atom> store_atoms;
  for (const auto& s : cfg.chr) store_atoms.push_back(s.atom);
  VarId block = base + cfg.rewrites * stride;
  std::set<std::string> seen;
  for (const auto& rule0 : prog.rules) {
    Rule rule = rename_rule(rule0, block);
    VarSet x = rule.vars();
    for_each_matching(rule.head, store_atoms, [&](const std::vector<std::size_t>& pick) {
      std::vector<std::uint32_t> ids;
      for (auto j : pick) ids.push_back(cfg.chr[j].id);
      bool propagate = rule.kind == RuleKind::Propagation;
      if (propagate && !opts.naive && cfg.fired.count({rule.name, ids})) return;
      BuiltinFormula eqs;
      for (std::size_t i = 0; i < pick.size(); ++i)
        for (std::size_t a = 0; a < rule.head[i].args.size(); ++a)
          eqs.eqs.push_back({rule.head[i].args[a], store_atoms[pick[i]].args[a]});
      if (!entails_exists(cfg.store, x, eqs, rule.guard).holds) return;
      StdConfig next = cfg;
      next.store = solve(cfg.store, eqs);
      next.rewrites = cfg.rewrites + 1;
      if (propagate) {
        if (!opts.naive) next.fired.insert({rule.name, ids});
      } else {
        std::vector<std::size_t> sorted = pick;
        std::sort(sorted.rbegin(), sorted.rend());
        for (auto j : sorted) next.chr.erase(next.chr.begin() + static_cast<std::ptrdiff_t>(j));
      }
      next.goal.insert(next.goal.end(), rule.body.begin(), rule.body.end());
      std::string k = rule.name + "#" + next.key();
      if (!seen.insert(k).second) return;
      out.push_back({propagate ? StdMove::Propagate : StdMove::Simplify, rule.name, std::move(next)});
    });
  }
  return out;
}

namespace {

enum class Observe { Sufficient, Qualified };

AnswerSet explore(const Program& prog, const Goal& goal, const StdOptions& opts, Observe mode) {
  // Without Introduce in the count, depth 0 still allows Introduce moves.
  if (opts.depth < (opts.count_introduce ? 1 : 0))
    throw std::invalid_argument("depth must be at least 1");
  StdEngine eng(prog, goal, opts);
  AnswerSet res;
  std::unordered_map<std::string, int> visited;  // key -> best remaining budget
  std::function<void(const StdConfig&, int)> dfs = [&](const StdConfig& cfg, int budget) {
    std::string k = cfg.key();
    auto it = visited.find(k);
    if (it != visited.end() && it->second >= budget) return;
    visited[k] = budget;
    ++res.configurations;
    if (cfg.failed()) {
      res.answers.insert("false");
      return;
    }
    auto succ = eng.step(cfg);
    if (succ.empty()) {
      if (!cfg.goal.empty()) return;
      if (mode == Observe::Sufficient) {
        if (cfg.chr.empty()) res.answers.insert(render_answer(cfg.store, goal));
      } else {
        res.answers.insert(render_qualified(cfg.chr_atoms(), cfg.store, goal));
      }
      return;
    }
    for (const auto& s : succ) {
      int cost = (s.move == StdMove::Introduce && !opts.count_introduce) ? 0 : 1;
      if (budget - cost < 0) {
        res.truncated = true;
        continue;
      }
      dfs(s.config, budget - cost);
    }
  };
  dfs(eng.initial(goal), opts.depth);
  return res;
}

}  // namespace

AnswerSet data_sufficient_answers(const Program& prog, const Goal& goal, const StdOptions& opts) {
  return explore(prog, goal, opts, Observe::Sufficient);
}

AnswerSet qualified_answers(const Program& prog, const Goal& goal, const StdOptions& opts) {
  return explore(prog, goal, opts, Observe::Qualified);
}

std::vector<Derivation> std_derivations(const Program& prog, const Goal& goal,
                                        const StdOptions& opts) {
  if (opts.depth < 1) throw std::invalid_argument("depth must be at least 1");
  StdEngine eng(prog, goal, opts);
  std::vector<Derivation> out;
  Derivation cur;
  std::function<void(const StdConfig&, int)> dfs = [&](const StdConfig& cfg, int budget) {
    cur.configs.push_back(cfg);
    auto succ = eng.step(cfg);
    if (succ.empty()) {
      out.push_back(cur);
    } else if (budget == 0) {
      out.push_back(cur);
      out.back().truncated = true;
    } else {
      for (const auto& s : succ) {
        cur.moves.push_back(s.rule.empty() ? to_string(s.move) : s.rule);
        dfs(s.config, budget - 1);
        cur.moves.pop_back();
      }
    }
    cur.configs.pop_back();
  };
  dfs(eng.initial(goal), opts.depth);
  return out;
}

std::string render_answer(const Store& d, const Goal& goal) {
  if (d.inconsistent()) return "false";
  Structure s;
  s.add_store("", project(d, goal.vars));
  Naming n;
  n.fixed_names = goal.var_names;
  n.prefix = "_";
  return render_store(s.parts[0].store, canonical_labelling(s, goal.vars), n);
}

std::string render_qualified(const AtomMultiset& k, const Store& d, const Goal& goal) {
  if (d.inconsistent()) return "false";
  AtomMultiset kk;
  for (const auto& a : k.to_vector()) kk.add(substitute(d.bindings(), a));
  std::vector<VarId> keep = goal.vars;
  for (auto v : free_vars(kk))
    if (std::find(keep.begin(), keep.end(), v) == keep.end()) keep.push_back(v);
  Structure s;
  s.add_atoms("", kk);
  s.add_store("", project(d, keep));
  Naming n;
  n.fixed_names = goal.var_names;
  n.prefix = "_";
  Labelling l = canonical_labelling(s, goal.vars);
  std::string store = render_store(s.parts[1].store, l, n);
  std::string atoms;
  for (const auto& a : render_atom_list(kk, l, n)) atoms += (atoms.empty() ? "" : ", ") + a;
  if (atoms.empty()) return store;
  return store == "true" ? atoms : atoms + ", " + store;
}

}  // namespace chrsem
