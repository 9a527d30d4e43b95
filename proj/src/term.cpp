#include "chrsem/term.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace chrsem {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::deque<std::string> names{""};  // id 0 is the empty symbol

  std::uint32_t intern(std::string_view s) {
    std::lock_guard lock(mu);
    auto it = ids.find(std::string(s));
    if (it != ids.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names.size());
    names.emplace_back(s);
    ids.emplace(std::string(s), id);
    return id;
  }
  const std::string& name(std::uint32_t id) {
    std::lock_guard lock(mu);
    return names[id];
  }
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Symbol::Symbol(std::string_view name) : id_(name.empty() ? 0 : table().intern(name)) {}

const std::string& Symbol::name() const { return table().name(id_); }

namespace sym {
Symbol eq() {
  static const Symbol s("=");
  return s;
}
Symbol falsum() {
  static const Symbol s("false");
  return s;
}
}  // namespace sym

Term Term::var(VarId id, Symbol display) {
  auto n = std::make_shared<Node>();
  n->is_var = true;
  n->ground = false;
  n->var = id;
  n->symbol = display;
  n->hash = mix(0x51ed, id);
  return Term(std::move(n));
}

Term Term::compound(Symbol functor, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->symbol = functor;
  std::size_t h = mix(0xc0ffee, functor.id());
  for (const auto& a : args) {
    n->ground = n->ground && a.is_ground();
    h = mix(h, a.hash());
  }
  n->hash = h;
  n->args = std::move(args);
  return Term(std::move(n));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.is_var() != b.is_var()) return false;
  if (a.is_var()) return a.var_id() == b.var_id();
  if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.args()[i] == b.args()[i])) return false;
  return true;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (a.is_var() != b.is_var())
    return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_var()) return a.var_id() <=> b.var_id();
  if (auto c = a.functor() <=> b.functor(); c != 0) return c;
  if (auto c = a.arity() <=> b.arity(); c != 0) return c;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (auto c = a.args()[i] <=> b.args()[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

Atom Atom::user(Symbol pred, std::vector<Term> args) { return Atom{pred, std::move(args), {}}; }

Atom Atom::equation(Term lhs, Term rhs) {
  return Atom{sym::eq(), {std::move(lhs), std::move(rhs)}, {}};
}

Atom Atom::falsum() { return Atom{sym::falsum(), {}, {}}; }

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.pred <=> b.pred; c != 0) return c;
  if (auto c = a.args.size() <=> b.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (auto c = a.args[i] <=> b.args[i]; c != 0) return c;
  return a.index <=> b.index;
}

// ---------------------------------------------------------------------------
// AtomMultiset

AtomMultiset::AtomMultiset(std::initializer_list<Atom> atoms) {
  for (const auto& a : atoms) add(a);
}

AtomMultiset::AtomMultiset(std::span<const Atom> atoms) {
  for (const auto& a : atoms) add(a);
}

void AtomMultiset::add(const Atom& a, std::size_t n) {
  if (n == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), a,
                             [](const Entry& e, const Atom& x) { return e.first < x; });
  if (it != entries_.end() && it->first == a)
    it->second += n;
  else
    entries_.insert(it, {a, n});
}

std::size_t AtomMultiset::remove(const Atom& a, std::size_t n) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), a,
                             [](const Entry& e, const Atom& x) { return e.first < x; });
  if (it == entries_.end() || !(it->first == a)) return 0;
  std::size_t k = std::min(n, it->second);
  it->second -= k;
  if (it->second == 0) entries_.erase(it);
  return k;
}

std::size_t AtomMultiset::count(const Atom& a) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), a,
                             [](const Entry& e, const Atom& x) { return e.first < x; });
  return (it != entries_.end() && it->first == a) ? it->second : 0;
}

std::size_t AtomMultiset::size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second;
  return n;
}

std::vector<Atom> AtomMultiset::to_vector() const {
  std::vector<Atom> out;
  for (const auto& [a, n] : entries_)
    for (std::size_t i = 0; i < n; ++i) out.push_back(a);
  return out;
}

AtomMultiset AtomMultiset::operator+(const AtomMultiset& o) const {
  AtomMultiset r = *this;
  for (const auto& [a, n] : o.entries_) r.add(a, n);
  return r;
}

bool AtomMultiset::subset_of(const AtomMultiset& o) const {
  for (const auto& [a, n] : entries_)
    if (o.count(a) < n) return false;
  return true;
}

AtomMultiset AtomMultiset::strip_indexes() const {
  AtomMultiset r;
  for (const auto& [a, n] : entries_) r.add(a.unindexed(), n);
  return r;
}

AtomMultiset AtomMultiset::with_index(std::uint32_t i) const {
  AtomMultiset r;
  for (const auto& [a, n] : entries_) r.add(a.with_index(i), n);
  return r;
}

AtomMultiset AtomMultiset::user_atoms() const {
  AtomMultiset r;
  for (const auto& [a, n] : entries_)
    if (a.is_user()) r.add(a, n);
  return r;
}

AtomMultiset mdiff(const AtomMultiset& a, const AtomMultiset& b, bool respect_index) {
  AtomMultiset r = a;
  if (respect_index) {
    for (const auto& [x, n] : b.entries()) r.remove(x, n);
    return r;
  }
  for (const auto& [x, n] : b.entries()) {
    std::size_t left = n;
    while (left > 0) {
      const Atom* hit = nullptr;
      for (const auto& [y, m] : r.entries())
        if (y.same_content(x)) {
          hit = &y;
          break;
        }
      if (!hit) break;
      Atom victim = *hit;
      left -= r.remove(victim, left);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Substitutions and variables

Term substitute(const Substitution& s, const Term& t) {
  if (s.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    auto it = s.find(t.var_id());
    return it == s.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(substitute(s, a));
    changed = changed || !(args.back() == a);
  }
  return changed ? Term::compound(t.functor(), std::move(args)) : t;
}

Atom substitute(const Substitution& s, const Atom& a) {
  Atom r = a;
  for (auto& t : r.args) t = substitute(s, t);
  return r;
}

Substitution normalize(const Substitution& s) {
  Substitution cur = s;
  // Iterate to the idempotent closure; terminates for acyclic maps.
  for (std::size_t round = 0; round <= s.size(); ++round) {
    Substitution next;
    bool changed = false;
    for (const auto& [v, t] : cur) {
      Term nt = substitute(cur, t);
      changed = changed || !(nt == t);
      if (!(nt.is_var() && nt.var_id() == v)) next.emplace(v, nt);
    }
    cur = std::move(next);
    if (!changed) break;
  }
  return cur;
}

void collect_vars(const Term& t, VarSet& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    out.insert(t.var_id());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

VarSet free_vars(const Term& t) {
  VarSet s;
  collect_vars(t, s);
  return s;
}

VarSet free_vars(const Atom& a) {
  VarSet s;
  for (const auto& t : a.args) collect_vars(t, s);
  return s;
}

VarSet free_vars(std::span<const Atom> atoms) {
  VarSet s;
  for (const auto& a : atoms)
    for (const auto& t : a.args) collect_vars(t, s);
  return s;
}

VarSet free_vars(const AtomMultiset& m) {
  VarSet s;
  for (const auto& [a, n] : m.entries())
    for (const auto& t : a.args) collect_vars(t, s);
  return s;
}

bool occurs(VarId v, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_var()) return t.var_id() == v;
  for (const auto& a : t.args())
    if (occurs(v, a)) return true;
  return false;
}

VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet r = a;
  r.insert(b.begin(), b.end());
  return r;
}

VarSet set_minus(const VarSet& a, const VarSet& b) {
  VarSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

VarSet set_intersect(const VarSet& a, const VarSet& b) {
  VarSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

bool disjoint(const VarSet& a, const VarSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return true;
}

bool subset_of(const VarSet& a, const VarSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void FreshSupply::reserve_above(VarId v) {
  VarId cur = next_.load();
  while (cur <= v && !next_.compare_exchange_weak(cur, v + 1)) {
  }
}

std::vector<Atom> rename_apart(std::span<const Atom> atoms, FreshSupply& supply,
                               Substitution* renaming) {
  Substitution ren;
  for (const auto& v : free_vars(atoms)) ren.emplace(v, Term::var(supply.next()));
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(substitute(ren, a));
  if (renaming) *renaming = std::move(ren);
  return out;
}

VarId max_var(const Term& t) {
  VarId m = 0;
  for (auto v : free_vars(t)) m = std::max(m, v);
  return m;
}

VarId max_var(std::span<const Atom> atoms) {
  VarId m = 0;
  for (auto v : free_vars(atoms)) m = std::max(m, v);
  return m;
}

// ---------------------------------------------------------------------------
// Printing

namespace {
void print(std::ostream& os, const Term& t) {
  if (t.is_var()) {
    if (!t.display_name().empty())
      os << t.display_name().name();
    else
      os << "_G" << t.var_id();
    return;
  }
  os << t.functor().name();
  if (t.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) os << ',';
    print(os, t.args()[i]);
  }
  os << ')';
}
}  // namespace

std::string raw_string(const Term& t) {
  if (t.is_var()) return "_" + std::to_string(t.var_id());
  std::string s = t.functor().name();
  if (t.arity() == 0) return s;
  s += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) s += ',';
    s += raw_string(t.args()[i]);
  }
  return s + ')';
}

std::string raw_string(const Atom& a) {
  std::string s = a.pred.name() + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += raw_string(a.args[i]);
  }
  s += ')';
  if (a.index) s += "^" + std::to_string(*a.index);
  return s;
}

std::string raw_string(const AtomMultiset& m) {
  std::string s;
  for (const auto& [a, n] : m.entries()) s += raw_string(a) + "*" + std::to_string(n) + ";";
  return s;
}

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

std::string to_string(const Atom& a) {
  std::ostringstream os;
  if (a.is_equation()) {
    print(os, a.args[0]);
    os << " = ";
    print(os, a.args[1]);
  } else {
    os << a.pred.name();
    if (!a.args.empty()) {
      os << '(';
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) os << ',';
        print(os, a.args[i]);
      }
      os << ')';
    }
  }
  if (a.index) os << '^' << *a.index;
  return os.str();
}

std::string to_string(const AtomMultiset& m) {
  std::string s = "{";
  bool first = true;
  for (const auto& a : m.to_vector()) {
    if (!first) s += ", ";
    first = false;
    s += to_string(a);
  }
  return s + "}";
}

}  // namespace chrsem
