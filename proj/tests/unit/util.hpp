#pragma once

#include <string>

#include "chrsem/syntax.hpp"

namespace testutil {

inline chrsem::Store store(const std::string& text, chrsem::GoalScope& scope) {
  return chrsem::solve(chrsem::Store::top(), chrsem::parse_builtins(text, scope));
}

inline chrsem::Atom atom(const std::string& text, chrsem::GoalScope& scope) {
  return chrsem::parse_goal(text, scope).items.at(0);
}

inline chrsem::AtomMultiset atoms(const std::string& text, chrsem::GoalScope& scope) {
  chrsem::AtomMultiset m;
  if (text.empty()) return m;
  for (const auto& a : chrsem::parse_goal(text, scope).items) m.add(a);
  return m;
}

}  // namespace testutil
