#pragma once

// Canonical variable numbering for stores and atom multisets, so that values
// equal up to renaming of their non-fixed variables print identically.

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chrsem/store.hpp"
#include "chrsem/term.hpp"

namespace chrsem {

/// A flat list of tagged stores and multisets. Abstract sequences, answers
/// and configurations are all flattened into this shape.
struct Structure {
  struct Part {
    std::string tag;
    bool is_store = false;
    Store store;
    AtomMultiset atoms;
  };
  std::vector<Part> parts;

  void add_store(std::string tag, Store s) { parts.push_back({std::move(tag), true, std::move(s), {}}); }
  void add_atoms(std::string tag, AtomMultiset m) {
    parts.push_back({std::move(tag), false, Store::top(), std::move(m)});
  }
  VarSet vars() const;
};

struct Naming {
  /// Names for the fixed variables, in label order.
  std::vector<std::string> fixed_names;
  /// Non-fixed variable with label k prints as prefix + k.
  std::string prefix = "V";
};

/// Label per variable: fixed variables get 0..f-1 in the given order, the
/// others f, f+1, ... chosen to minimise the rendering.
struct Labelling {
  std::map<VarId, std::uint32_t> label;
  bool overflow = false;
};

Labelling canonical_labelling(const Structure& s, const std::vector<VarId>& fixed);

std::string render_term(const Term& t, const Labelling& l, const Naming& n);
std::string render_atom(const Atom& a, const Labelling& l, const Naming& n);
std::string render_atoms(const AtomMultiset& m, const Labelling& l, const Naming& n);
std::vector<std::string> render_atom_list(const AtomMultiset& m, const Labelling& l, const Naming& n);
std::string render_store(const Store& d, const Labelling& l, const Naming& n);
std::string render(const Structure& s, const Labelling& l, const Naming& n);

/// Canonical rendering with the default naming (fixed V0..Vf-1).
std::string canonical_string(const Structure& s, const std::vector<VarId>& fixed);

/// Number of labellings that hit the permutation cap (process-wide).
std::uint64_t canonical_overflow_count();
void set_permutation_cap(std::size_t cap);

}  // namespace chrsem
