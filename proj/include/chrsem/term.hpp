#pragma once

// First-order terms, atoms, atom multisets and substitutions.
//
// Terms are immutable and shared; copying a Term copies a pointer. Variables
// are identified by an integer id only; the optional display name is used by
// the printers and never by comparisons.

#include <atomic>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chrsem {

using VarId = std::uint32_t;
using VarSet = std::set<VarId>;

/// Interned functor / predicate name. Ordering follows interning order, which
/// is deterministic for a given input; canonical output never relies on it.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  const std::string& name() const;
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend auto operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

 private:
  std::uint32_t id_ = 0;
};

namespace sym {
Symbol eq();      // "="  built-in equation item
Symbol falsum();  // "false" built-in item
}  // namespace sym

class Term {
 public:
  static Term var(VarId id, Symbol display = {});
  static Term compound(Symbol functor, std::vector<Term> args = {});
  static Term constant(std::string_view name) { return compound(Symbol(name)); }

  bool is_var() const { return node_->is_var; }
  VarId var_id() const { return node_->var; }
  Symbol display_name() const { return node_->symbol; }
  Symbol functor() const { return node_->symbol; }
  std::span<const Term> args() const { return node_->args; }
  std::size_t arity() const { return node_->args.size(); }
  bool is_ground() const { return node_->ground; }
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    bool is_var = false;
    bool ground = true;
    VarId var = 0;
    Symbol symbol;
    std::vector<Term> args;
    std::size_t hash = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// A goal item: user-defined atom, built-in equation `l = r`, or `false`.
/// Indexes are only meaningful for items of compositional-trace goals.
struct Atom {
  Symbol pred;
  std::vector<Term> args;
  std::optional<std::uint32_t> index;

  static Atom user(Symbol pred, std::vector<Term> args = {});
  static Atom equation(Term lhs, Term rhs);
  static Atom falsum();

  bool is_equation() const { return pred == sym::eq() && args.size() == 2; }
  bool is_false() const { return pred == sym::falsum() && args.empty(); }
  bool is_builtin() const { return is_equation() || is_false(); }
  bool is_user() const { return !is_builtin(); }

  Atom with_index(std::optional<std::uint32_t> i) const {
    Atom a = *this;
    a.index = i;
    return a;
  }
  Atom unindexed() const { return with_index(std::nullopt); }

  /// Same predicate and arguments, ignoring the index.
  bool same_content(const Atom& o) const { return pred == o.pred && args == o.args; }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

/// Multiset of atoms kept as a sorted association list (element -> count),
/// so equality is structural and iteration order deterministic.
class AtomMultiset {
 public:
  using Entry = std::pair<Atom, std::size_t>;

  AtomMultiset() = default;
  AtomMultiset(std::initializer_list<Atom> atoms);
  explicit AtomMultiset(std::span<const Atom> atoms);

  void add(const Atom& a, std::size_t n = 1);
  /// Removes up to n copies; returns how many were removed.
  std::size_t remove(const Atom& a, std::size_t n = 1);
  std::size_t count(const Atom& a) const;
  bool contains(const Atom& a) const { return count(a) > 0; }

  std::size_t size() const;  // total multiplicity
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  /// Elements expanded with multiplicity, in sorted order.
  std::vector<Atom> to_vector() const;

  /// Multiset union.
  AtomMultiset operator+(const AtomMultiset& o) const;
  /// Multiset inclusion (element-wise count comparison).
  bool subset_of(const AtomMultiset& o) const;
  /// Drops every index.
  AtomMultiset strip_indexes() const;
  /// Sets every index to i.
  AtomMultiset with_index(std::uint32_t i) const;
  /// Only user-defined atoms.
  AtomMultiset user_atoms() const;

  friend bool operator==(const AtomMultiset&, const AtomMultiset&) = default;
  friend auto operator<=>(const AtomMultiset& a, const AtomMultiset& b) {
    return a.entries_ <=> b.entries_;
  }

 private:
  std::vector<Entry> entries_;
};

/// Multiset difference a \ b with saturation at zero. With respect_index the
/// atoms must agree on predicate, arguments and index; without it, indexes
/// are ignored and the lowest-ordered matching element of a is removed.
AtomMultiset mdiff(const AtomMultiset& a, const AtomMultiset& b, bool respect_index);

/// Finite map Variable -> Term. Kept idempotent by construction in the
/// built-in theory; `normalize` closes an arbitrary acyclic map.
using Substitution = std::map<VarId, Term>;

Term substitute(const Substitution& s, const Term& t);
Atom substitute(const Substitution& s, const Atom& a);
Substitution normalize(const Substitution& s);

void collect_vars(const Term& t, VarSet& out);
VarSet free_vars(const Term& t);
VarSet free_vars(const Atom& a);
VarSet free_vars(std::span<const Atom> atoms);
VarSet free_vars(const AtomMultiset& m);
bool occurs(VarId v, const Term& t);

VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_minus(const VarSet& a, const VarSet& b);
VarSet set_intersect(const VarSet& a, const VarSet& b);
bool disjoint(const VarSet& a, const VarSet& b);
bool subset_of(const VarSet& a, const VarSet& b);

/// Source of never-before-issued variable ids.
class FreshSupply {
 public:
  explicit FreshSupply(VarId first = 0) : next_(first) {}
  FreshSupply(const FreshSupply& o) : next_(o.next_.load()) {}
  FreshSupply& operator=(const FreshSupply& o) {
    next_ = o.next_.load();
    return *this;
  }
  VarId next() { return next_.fetch_add(1); }
  VarId peek() const { return next_.load(); }
  /// Guarantees every later id is strictly above v.
  void reserve_above(VarId v);

 private:
  std::atomic<VarId> next_;
};

/// Renames every variable of the atoms to a fresh one, consistently.
/// `renaming` (optional) receives the old -> new map.
std::vector<Atom> rename_apart(std::span<const Atom> atoms, FreshSupply& supply,
                               Substitution* renaming = nullptr);

VarId max_var(const Term& t);
VarId max_var(std::span<const Atom> atoms);

// Printers keyed on variable ids only (`_<id>`), for hashing and memo keys.
std::string raw_string(const Term& t);
std::string raw_string(const Atom& a);
std::string raw_string(const AtomMultiset& m);

// Plain printers (display names when present, otherwise `_G<id>`).
std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const AtomMultiset& m);

}  // namespace chrsem

template <>
struct std::hash<chrsem::Term> {
  std::size_t operator()(const chrsem::Term& t) const noexcept { return t.hash(); }
};
