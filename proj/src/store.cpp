#include "chrsem/store.hpp"

#include <algorithm>
#include <functional>

namespace chrsem {

BuiltinFormula BuiltinFormula::from_items(std::span<const Atom> items) {
  BuiltinFormula f;
  for (const auto& a : items) {
    if (a.is_false())
      f.falsum = true;
    else if (a.is_equation())
      f.eqs.push_back({a.args[0], a.args[1]});
  }
  return f;
}

namespace {

// Robinson unification into an idempotent substitution. `bindable` limits
// which variables may be bound; everything else behaves as a constant.
class Unifier {
 public:
  explicit Unifier(Substitution s, std::function<bool(VarId)> bindable = {})
      : s_(std::move(s)), bindable_(std::move(bindable)) {}

  bool unify(const Term& a0, const Term& b0) {
    std::vector<std::pair<Term, Term>> work{{a0, b0}};
    while (!work.empty()) {
      auto [a, b] = work.back();
      work.pop_back();
      a = substitute(s_, a);
      b = substitute(s_, b);
      if (a == b) continue;
      if (a.is_var() && b.is_var()) {
        bool ba = can_bind(a.var_id());
        bool bb = can_bind(b.var_id());
        if (!ba && !bb) return false;
        // Higher id points to lower id unless only one side is bindable.
        if (ba && bb) {
          if (a.var_id() > b.var_id())
            bind(a.var_id(), b);
          else
            bind(b.var_id(), a);
        } else if (ba) {
          bind(a.var_id(), b);
        } else {
          bind(b.var_id(), a);
        }
        continue;
      }
      if (a.is_var() || b.is_var()) {
        const Term& v = a.is_var() ? a : b;
        const Term& t = a.is_var() ? b : a;
        if (!can_bind(v.var_id()) || occurs(v.var_id(), t)) return false;
        bind(v.var_id(), t);
        continue;
      }
      if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i) work.emplace_back(a.args()[i], b.args()[i]);
    }
    return true;
  }

  const Substitution& subst() const { return s_; }

 private:
  bool can_bind(VarId v) const { return !bindable_ || bindable_(v); }

  void bind(VarId v, const Term& t) {
    Substitution single{{v, t}};
    for (auto& [k, val] : s_) val = substitute(single, val);
    s_.emplace(v, t);
  }

  Substitution s_;
  std::function<bool(VarId)> bindable_;
};

}  // namespace

Store Store::from_bindings(const Substitution& s) {
  Store r;
  for (const auto& [v, t] : s) {
    r = solve(r, Term::var(v), t);
    if (r.inconsistent()) return r;
  }
  return r;
}

Store solve(const Store& d, const BuiltinFormula& c) {
  if (d.inconsistent() || c.falsum) return Store::bottom();
  Unifier u(d.bindings());
  for (const auto& e : c.eqs)
    if (!u.unify(e.lhs, e.rhs)) return Store::bottom();
  return Store::solved(u.subst());
}

Store solve(const Store& d, const Term& lhs, const Term& rhs) {
  return solve(d, BuiltinFormula::of(lhs, rhs));
}

Store conjoin(const Store& a, const Store& b) {
  if (a.inconsistent() || b.inconsistent()) return Store::bottom();
  BuiltinFormula f;
  for (const auto& [v, t] : b.bindings()) f.eqs.push_back({Term::var(v), t});
  return solve(a, f);
}

Entailment entails_exists(const Store& d, const VarSet& x, const BuiltinFormula& eqs,
                          const BuiltinFormula& guard) {
  if (d.inconsistent()) return {true, {}};
  if (eqs.falsum || guard.falsum) return {false, {}};
  Unifier u({}, [&x](VarId v) { return x.count(v) > 0; });
  auto run = [&](const BuiltinFormula& f) {
    for (const auto& e : f.eqs)
      if (!u.unify(substitute(d.bindings(), e.lhs), substitute(d.bindings(), e.rhs))) return false;
    return true;
  };
  if (!run(eqs) || !run(guard)) return {false, {}};
  return {true, u.subst()};
}

bool is_false(const Store& d) { return d.inconsistent(); }

bool implies(const Store& c1, const Store& c2) {
  if (c1.inconsistent()) return true;
  if (c2.inconsistent()) return false;
  for (const auto& [v, t] : c2.bindings())
    if (!(substitute(c1.bindings(), Term::var(v)) == substitute(c1.bindings(), t))) return false;
  return true;
}

bool equivalent(const Store& a, const Store& b) { return implies(a, b) && implies(b, a); }

Store project(const Store& d, const std::vector<VarId>& keep) {
  if (d.inconsistent()) return d;
  VarSet kept(keep.begin(), keep.end());
  std::map<VarId, Term> value;
  for (auto v : keep) value.emplace(v, substitute(d.bindings(), Term::var(v)));
  // A non-kept variable equal to kept ones is replaced by the last of them.
  Substitution rep;
  for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
    const Term& t = value.at(*it);
    if (t.is_var() && !kept.count(t.var_id()) && !rep.count(t.var_id()))
      rep.emplace(t.var_id(), Term::var(*it));
  }
  Substitution out;
  for (auto v : keep) {
    Term t = substitute(rep, value.at(v));
    if (t.is_var() && t.var_id() == v) continue;
    out.emplace(v, t);
  }
  // A kept variable whose value is a bare non-kept variable that nothing
  // else mentions carries no information.
  std::map<VarId, int> uses;
  for (const auto& [v, t] : out)
    for (auto w : free_vars(t)) ++uses[w];
  for (auto it = out.begin(); it != out.end();) {
    const Term& t = it->second;
    if (t.is_var() && !kept.count(t.var_id()) && uses[t.var_id()] == 1)
      it = out.erase(it);
    else
      ++it;
  }
  return Store::from_bindings(out);
}

VarSet free_vars(const Store& d) {
  VarSet s;
  for (const auto& [v, t] : d.bindings()) {
    s.insert(v);
    collect_vars(t, s);
  }
  return s;
}

std::vector<Equation> equations(const Store& d) {
  std::vector<Equation> out;
  for (const auto& [v, t] : d.bindings()) out.push_back({Term::var(v), t});
  return out;
}

Store rename(const Store& d, const Substitution& renaming) {
  if (d.inconsistent()) return d;
  BuiltinFormula f;
  for (const auto& [v, t] : d.bindings())
    f.eqs.push_back({substitute(renaming, Term::var(v)), substitute(renaming, t)});
  return solve(Store::top(), f);
}

namespace {

// Equal-variable classes rooted at their greatest member, then the
// non-variable bindings with class roots substituted.
std::vector<std::pair<Term, Term>> oriented(const Store& d) {
  std::map<VarId, std::vector<VarId>> classes;
  for (const auto& [v, t] : d.bindings())
    if (t.is_var()) classes[t.var_id()].push_back(v);
  Substitution to_rep;
  for (const auto& [root, members] : classes) {
    VarId rep = root;
    for (auto m : members) rep = std::max(rep, m);
    Term r = Term::var(rep);
    if (rep != root) to_rep.emplace(root, r);
    for (auto m : members)
      if (m != rep) to_rep.emplace(m, r);
  }
  std::vector<std::pair<Term, Term>> out;
  for (const auto& [root, members] : classes) {
    std::vector<VarId> all = members;
    all.push_back(root);
    for (auto m : all) {
      auto it = to_rep.find(m);
      if (it != to_rep.end()) out.emplace_back(Term::var(m), it->second);
    }
  }
  for (const auto& [v, t] : d.bindings())
    if (!t.is_var()) out.emplace_back(Term::var(v), substitute(to_rep, t));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.var_id() != b.first.var_id()) return a.first.var_id() < b.first.var_id();
    return a.second < b.second;
  });
  return out;
}

}  // namespace

std::string raw_key(const Store& d) {
  if (d.inconsistent()) return "false";
  if (d.bindings().empty()) return "true";
  std::string s;
  for (const auto& [l, r] : oriented(d)) {
    if (!s.empty()) s += ',';
    s += raw_string(l) + '=' + raw_string(r);
  }
  return s;
}

std::string to_string(const Store& d) {
  if (d.inconsistent()) return "false";
  if (d.bindings().empty()) return "true";
  std::string s;
  for (const auto& [v, t] : d.bindings()) {
    if (!s.empty()) s += ", ";
    s += to_string(Term::var(v)) + " = " + to_string(t);
  }
  return s;
}

}  // namespace chrsem
