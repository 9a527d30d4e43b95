#include "oracle.hpp"

#include <algorithm>
#include <functional>

namespace oracle {

T from(const chrsem::Term& t) {
  T out;
  if (t.is_var()) {
    out.var = static_cast<int>(t.var_id());
    return out;
  }
  out.f = t.functor().name();
  for (const auto& a : t.args()) out.args.push_back(from(a));
  return out;
}

std::vector<Eq> from(const chrsem::BuiltinFormula& f) {
  std::vector<Eq> out;
  if (f.falsum) out.push_back({T{-1, "#t", {}}, T{-1, "#f", {}}});
  for (const auto& e : f.eqs) out.push_back({from(e.lhs), from(e.rhs)});
  return out;
}

std::vector<Eq> from(const chrsem::Store& d) {
  std::vector<Eq> out;
  if (d.inconsistent()) out.push_back({T{-1, "#t", {}}, T{-1, "#f", {}}});
  for (const auto& [v, t] : d.bindings()) out.push_back({T{static_cast<int>(v), "", {}}, from(t)});
  return out;
}

T resolve(const T& t, const Subst& s) {
  if (t.is_var()) {
    auto it = s.find(t.var);
    return it == s.end() ? t : resolve(it->second, s);
  }
  T out = t;
  for (auto& a : out.args) a = resolve(a, s);
  return out;
}

namespace {

bool occurs_in(int v, const T& t) {
  if (t.is_var()) return t.var == v;
  return std::any_of(t.args.begin(), t.args.end(), [&](const T& a) { return occurs_in(v, a); });
}

void vars_of(const T& t, std::set<int>& out) {
  if (t.is_var()) {
    out.insert(t.var);
    return;
  }
  for (const auto& a : t.args) vars_of(a, out);
}

T ground_with(const T& t, const std::map<int, T>& consts) {
  if (t.is_var()) {
    auto it = consts.find(t.var);
    return it == consts.end() ? t : it->second;
  }
  T out = t;
  for (auto& a : out.args) a = ground_with(a, consts);
  return out;
}

}  // namespace

std::optional<Subst> unify(const std::vector<Eq>& eqs) {
  Subst s;
  std::vector<Eq> work(eqs.rbegin(), eqs.rend());
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    a = resolve(a, s);
    b = resolve(b, s);
    if (a == b) continue;
    if (!a.is_var() && b.is_var()) std::swap(a, b);
    if (a.is_var()) {
      if (occurs_in(a.var, b)) return std::nullopt;
      s[a.var] = b;
      continue;
    }
    if (a.f != b.f || a.args.size() != b.args.size()) return std::nullopt;
    for (std::size_t i = 0; i < a.args.size(); ++i) work.push_back({a.args[i], b.args[i]});
  }
  return s;
}

std::vector<T> ground_terms(const std::vector<std::pair<std::string, int>>& sig,
                            const std::vector<std::string>& extra, int depth) {
  std::vector<T> all;
  for (const auto& [f, n] : sig)
    if (n == 0) all.push_back(T{-1, f, {}});
  for (const auto& c : extra) all.push_back(T{-1, c, {}});
  for (int level = 1; level <= depth; ++level) {
    std::vector<T> grown = all;
    for (const auto& [f, n] : sig) {
      if (n == 0) continue;
      std::vector<std::size_t> pick(n, 0);
      std::function<void(int)> rec = [&](int i) {
        if (i == n) {
          T t{-1, f, {}};
          for (auto k : pick) t.args.push_back(all[k]);
          if (std::find(grown.begin(), grown.end(), t) == grown.end()) grown.push_back(t);
          return;
        }
        for (std::size_t k = 0; k < all.size(); ++k) {
          pick[i] = k;
          rec(i + 1);
        }
      };
      rec(0);
    }
    all = std::move(grown);
  }
  return all;
}

bool entails(const std::vector<Eq>& d, const std::set<int>& x, const std::vector<Eq>& phi,
             const std::vector<std::pair<std::string, int>>& sig, int depth) {
  auto sd = unify(d);
  if (!sd) return true;
  std::vector<Eq> p;
  std::set<int> free;
  for (const auto& [l, r] : phi) {
    p.push_back({resolve(l, *sd), resolve(r, *sd)});
    vars_of(p.back().first, free);
    vars_of(p.back().second, free);
  }
  std::map<int, T> skolem;
  std::vector<std::string> extra;
  for (int v : free)
    if (!x.count(v)) {
      extra.push_back("#" + std::to_string(v));
      skolem[v] = T{-1, extra.back(), {}};
    }
  for (auto& [l, r] : p) {
    l = ground_with(l, skolem);
    r = ground_with(r, skolem);
  }
  std::vector<int> xs;
  for (int v : x)
    if (free.count(v)) xs.push_back(v);
  auto universe = ground_terms(sig, extra, depth);
  if (universe.empty()) universe.push_back(T{-1, "#c", {}});
  std::vector<std::size_t> pick(xs.size(), 0);
  for (;;) {
    std::map<int, T> rho;
    for (std::size_t i = 0; i < xs.size(); ++i) rho[xs[i]] = universe[pick[i]];
    bool ok = true;
    for (const auto& [l, r] : p)
      if (!(ground_with(l, rho) == ground_with(r, rho))) {
        ok = false;
        break;
      }
    if (ok) return true;
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == universe.size()) pick[k++] = 0;
    if (k == pick.size()) return false;
  }
}

bool implies(const std::vector<Eq>& a, const std::vector<Eq>& b) {
  auto sa = unify(a);
  if (!sa) return true;
  for (const auto& [l, r] : b)
    if (!(resolve(l, *sa) == resolve(r, *sa))) return false;
  return true;
}

QueryGenerator::QueryGenerator(std::vector<std::pair<std::string, int>> sig, std::uint64_t seed)
    : sig_(std::move(sig)), rng_(seed) {
  if (std::none_of(sig_.begin(), sig_.end(), [](const auto& f) { return f.second == 0; }))
    sig_.push_back({"a", 0});
}

chrsem::Term QueryGenerator::leaf(bool with_x) {
  std::vector<chrsem::Term> leaves{chrsem::Term::var(1), chrsem::Term::var(2)};
  for (const auto& [f, n] : sig_)
    if (n == 0) leaves.push_back(chrsem::Term::constant(f));
  if (with_x)
    for (int i = 0; i < nx_; ++i) leaves.push_back(chrsem::Term::var(10 + i));
  std::uniform_int_distribution<std::size_t> k(0, leaves.size() - 1);
  return leaves[k(rng_)];
}

chrsem::Term QueryGenerator::shallow(bool with_x) {
  std::vector<std::pair<std::string, int>> funs;
  for (const auto& f : sig_)
    if (f.second > 0) funs.push_back(f);
  std::bernoulli_distribution compound(0.35);
  if (funs.empty() || !compound(rng_)) return leaf(with_x);
  std::uniform_int_distribution<std::size_t> k(0, funs.size() - 1);
  const auto& [f, n] = funs[k(rng_)];
  std::vector<chrsem::Term> args;
  for (int i = 0; i < n; ++i) args.push_back(leaf(with_x));
  return chrsem::Term::compound(chrsem::Symbol(f), std::move(args));
}

Query QueryGenerator::next() {
  std::uniform_int_distribution<int> nx(1, 2), count(0, 2);
  std::bernoulli_distribution with_guard(0.3);
  nx_ = nx(rng_);
  Query q;
  for (int i = 0; i < nx_; ++i) q.x.insert(static_cast<chrsem::VarId>(10 + i));
  chrsem::BuiltinFormula df;
  for (int i = count(rng_); i > 0; --i) df.eqs.push_back({chrsem::Term::var(1 + i % 2), leaf(false)});
  q.d = chrsem::solve(chrsem::Store::top(), df);
  if (q.d.inconsistent()) q.d = chrsem::Store::top();
  for (int i = count(rng_); i > 0; --i) q.eqs.eqs.push_back({shallow(true), shallow(true)});
  if (with_guard(rng_)) q.guard.eqs.push_back({leaf(true), shallow(true)});
  return q;
}

}  // namespace oracle
