#include "chrsem/canonical.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace chrsem {

namespace {

std::atomic<std::uint64_t> g_overflows{0};
std::atomic<std::size_t> g_cap{40320};

std::string var_name(VarId v, const Labelling& l, const Naming& n) {
  auto it = l.label.find(v);
  if (it == l.label.end()) return "_G" + std::to_string(v);
  auto k = it->second;
  if (k < n.fixed_names.size()) return n.fixed_names[k];
  return n.prefix + std::to_string(k);
}

std::uint32_t label_of(VarId v, const Labelling& l) {
  auto it = l.label.find(v);
  return it == l.label.end() ? UINT32_MAX : it->second;
}

// Store classes: root -> members (root included).
struct StoreShape {
  std::map<VarId, std::vector<VarId>> classes;
  std::map<VarId, VarId> root_of;
};

StoreShape shape_of(const Store& d) {
  StoreShape sh;
  for (const auto& [v, t] : d.bindings())
    if (t.is_var()) {
      sh.classes[t.var_id()].push_back(v);
      sh.root_of[v] = t.var_id();
    }
  for (auto& [root, members] : sh.classes) {
    members.push_back(root);
    sh.root_of[root] = root;
  }
  return sh;
}

// ---------------------------------------------------------------------------
// Signatures

struct SigContext {
  const std::set<VarId>& fixed;
  const std::map<VarId, std::string>& fixed_name;
  const std::map<VarId, std::string>& prev;  // previous-round class tokens
};

std::string tok(VarId u, VarId v, const SigContext& cx) {
  if (u == v) return "@";
  if (cx.fixed.count(u)) return cx.fixed_name.at(u);
  auto it = cx.prev.find(u);
  return it == cx.prev.end() ? "_" : "_" + it->second;
}

void sig_term(const Term& t, VarId v, const SigContext& cx, std::string& out,
              const std::function<std::string(VarId)>& vtok) {
  if (t.is_var()) {
    out += vtok(t.var_id());
    return;
  }
  out += t.functor().name();
  if (t.arity() == 0) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    sig_term(t.args()[i], v, cx, out, vtok);
  }
  out += ')';
}

std::vector<std::string> contexts_of(const Structure& s, VarId v, const SigContext& cx) {
  std::vector<std::string> ctx;
  auto plain = [&](VarId u) { return tok(u, v, cx); };
  for (std::size_t pi = 0; pi < s.parts.size(); ++pi) {
    const auto& p = s.parts[pi];
    std::string head = std::to_string(pi) + p.tag + "|";
    if (!p.is_store) {
      for (const auto& [a, n] : p.atoms.entries()) {
        if (!free_vars(a).count(v)) continue;
        std::string str = head + a.pred.name() + "(";
        for (std::size_t i = 0; i < a.args.size(); ++i) {
          if (i) str += ',';
          sig_term(a.args[i], v, cx, str, plain);
        }
        str += ")";
        if (a.index) str += "^" + std::to_string(*a.index);
        str += "#" + std::to_string(n);
        ctx.push_back(std::move(str));
      }
      continue;
    }
    if (p.store.inconsistent()) continue;
    StoreShape sh = shape_of(p.store);
    // Class token: independent of which member is the root.
    auto ctok = [&](VarId u) -> std::string {
      auto r = sh.root_of.find(u);
      if (r == sh.root_of.end()) return tok(u, v, cx);
      const auto& members = sh.classes.at(r->second);
      std::vector<std::string> ts;
      for (auto m : members) ts.push_back(tok(m, v, cx));
      std::sort(ts.begin(), ts.end());
      std::string out = "{";
      for (const auto& t : ts) out += t + ";";
      return out + "}";
    };
    for (const auto& [root, members] : sh.classes)
      if (std::find(members.begin(), members.end(), v) != members.end())
        ctx.push_back(head + "cls" + ctok(v));
    for (const auto& [x, t] : p.store.bindings()) {
      if (t.is_var()) continue;
      VarSet vs = free_vars(t);
      vs.insert(x);
      bool mentions = false;
      for (auto u : vs) {
        auto r = sh.root_of.find(u);
        if (u == v || (r != sh.root_of.end() && sh.root_of.count(v) && sh.root_of.at(v) == r->second))
          mentions = true;
      }
      if (!mentions) continue;
      std::string str = head + "bind" + ctok(x) + "=";
      sig_term(t, v, cx, str, ctok);
      ctx.push_back(std::move(str));
    }
  }
  std::sort(ctx.begin(), ctx.end());
  return ctx;
}

// Next permutation across the concatenation of groups (odometer style).
bool next_group_permutation(std::vector<std::vector<VarId>>& groups) {
  for (std::size_t g = groups.size(); g-- > 0;) {
    if (std::next_permutation(groups[g].begin(), groups[g].end())) return true;
    // next_permutation wrapped the group back to sorted order; carry.
  }
  return false;
}

}  // namespace

VarSet Structure::vars() const {
  VarSet s;
  for (const auto& p : parts) {
    if (p.is_store) {
      auto v = free_vars(p.store);
      s.insert(v.begin(), v.end());
    } else {
      auto v = free_vars(p.atoms);
      s.insert(v.begin(), v.end());
    }
  }
  return s;
}

std::string render_term(const Term& t, const Labelling& l, const Naming& n) {
  if (t.is_var()) return var_name(t.var_id(), l, n);
  std::string s = t.functor().name();
  if (t.arity() == 0) return s;
  s += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) s += ',';
    s += render_term(t.args()[i], l, n);
  }
  return s + ')';
}

std::string render_atom(const Atom& a, const Labelling& l, const Naming& n) {
  std::string s;
  if (a.is_equation()) {
    s = render_term(a.args[0], l, n) + " = " + render_term(a.args[1], l, n);
  } else {
    s = a.pred.name();
    if (!a.args.empty()) {
      s += '(';
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ',';
        s += render_term(a.args[i], l, n);
      }
      s += ')';
    }
  }
  if (a.index) s += "^" + std::to_string(*a.index);
  return s;
}

std::vector<std::string> render_atom_list(const AtomMultiset& m, const Labelling& l,
                                          const Naming& n) {
  std::vector<std::string> out;
  for (const auto& [a, k] : m.entries()) {
    std::string s = render_atom(a, l, n);
    for (std::size_t i = 0; i < k; ++i) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_atoms(const AtomMultiset& m, const Labelling& l, const Naming& n) {
  std::string s = "{";
  bool first = true;
  for (const auto& a : render_atom_list(m, l, n)) {
    if (!first) s += ", ";
    first = false;
    s += a;
  }
  return s + "}";
}

std::string render_store(const Store& d, const Labelling& l, const Naming& n) {
  if (d.inconsistent()) return "false";
  if (d.bindings().empty()) return "true";
  StoreShape sh = shape_of(d);
  // Representative of each class: the member with the greatest label.
  Substitution to_rep;
  std::vector<std::pair<std::uint32_t, std::pair<std::string, std::string>>> lines;
  for (const auto& [root, members] : sh.classes) {
    VarId rep = members.front();
    for (auto m : members)
      if (label_of(m, l) > label_of(rep, l) ||
          (label_of(m, l) == label_of(rep, l) && m > rep))
        rep = m;
    for (auto m : members)
      if (m != rep) to_rep.emplace(m, Term::var(rep));
    for (auto m : members)
      if (m != rep)
        lines.push_back({label_of(m, l), {var_name(m, l, n), var_name(rep, l, n)}});
  }
  for (const auto& [x, t] : d.bindings())
    if (!t.is_var())
      lines.push_back({label_of(x, l), {var_name(x, l, n), render_term(substitute(to_rep, t), l, n)}});
  std::sort(lines.begin(), lines.end());
  std::string s;
  for (const auto& [k, lr] : lines) {
    if (!s.empty()) s += ", ";
    s += lr.first + " = " + lr.second;
  }
  return s;
}

std::string render(const Structure& s, const Labelling& l, const Naming& n) {
  std::string out;
  for (const auto& p : s.parts) {
    out += p.tag + ":";
    out += p.is_store ? render_store(p.store, l, n) : render_atoms(p.atoms, l, n);
    out += ";";
  }
  return out;
}

Labelling canonical_labelling(const Structure& s, const std::vector<VarId>& fixed) {
  Labelling best;
  std::set<VarId> fixed_set(fixed.begin(), fixed.end());
  std::map<VarId, std::string> fixed_name;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    best.label[fixed[i]] = static_cast<std::uint32_t>(i);
    fixed_name[fixed[i]] = "V" + std::to_string(i);
  }
  std::vector<VarId> free;
  for (auto v : s.vars())
    if (!fixed_set.count(v)) free.push_back(v);
  if (free.empty()) return best;

  // Colour refinement on occurrence contexts.
  std::map<VarId, std::string> cls;
  std::vector<std::vector<VarId>> groups;
  for (int round = 0; round < 3; ++round) {
    std::map<VarId, std::string> sig;
    SigContext cx{fixed_set, fixed_name, cls};
    for (auto v : free) {
      std::string str;
      for (const auto& c : contexts_of(s, v, cx)) str += c + "\n";
      sig[v] = std::move(str);
    }
    std::map<std::string, std::vector<VarId>> by_sig;
    for (auto v : free) by_sig[sig[v]].push_back(v);
    std::map<VarId, std::string> next;
    std::size_t k = 0;
    groups.clear();
    for (auto& [str, vs] : by_sig) {
      for (auto v : vs) next[v] = std::to_string(k);
      groups.push_back(vs);
      ++k;
    }
    bool stable = next == cls;
    cls = std::move(next);
    if (stable) break;
  }

  std::size_t product = 1;
  bool overflow = false;
  for (const auto& g : groups) {
    for (std::size_t i = 2; i <= g.size(); ++i) {
      product *= i;
      if (product > g_cap.load()) {
        overflow = true;
        break;
      }
    }
    if (overflow) break;
  }

  Naming naming;
  auto assign = [&](const std::vector<std::vector<VarId>>& gs) {
    Labelling l;
    l.label = best.label;
    auto k = static_cast<std::uint32_t>(fixed.size());
    for (const auto& g : gs)
      for (auto v : g) l.label[v] = k++;
    return l;
  };
  for (auto& g : groups) std::sort(g.begin(), g.end());
  Labelling chosen = assign(groups);
  if (overflow) {
    ++g_overflows;
    chosen.overflow = true;
    return chosen;
  }
  std::string best_str = render(s, chosen, naming);
  while (next_group_permutation(groups)) {
    Labelling l = assign(groups);
    std::string str = render(s, l, naming);
    if (str < best_str) {
      best_str = std::move(str);
      chosen = std::move(l);
    }
  }
  return chosen;
}

std::string canonical_string(const Structure& s, const std::vector<VarId>& fixed) {
  return render(s, canonical_labelling(s, fixed), Naming{});
}

std::uint64_t canonical_overflow_count() { return g_overflows.load(); }

void set_permutation_cap(std::size_t cap) { g_cap = cap; }

}  // namespace chrsem
