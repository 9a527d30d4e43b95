#include "chrsem/observables.hpp"

#include <algorithm>
#include <stdexcept>

namespace chrsem {

ConnectedFlag is_connected(const AbstractSequence& s) {
  const auto& ts = s.tuples;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (!ts[i].K.empty()) return {false, 1, i + 1};
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (!equivalent(ts[i].d, ts[i + 1].c)) return {false, 2, i + 1};
  if (!ts.empty() && !ts.back().H.empty() && !ts.back().c.inconsistent())
    return {false, 3, ts.size()};
  return {};
}

AnswerSet sa_from_traces(const Program& prog, const Goal& goal, int depth) {
  TraceOptions o;
  o.depth = depth;
  o.assumptions = false;
  TraceSet ts = enumerate_sprime(prog, goal, o);
  AnswerSet res;
  res.truncated = ts.truncated;
  for (const auto& delta : ts.sequences) {
    ++res.configurations;
    AbstractSequence s = alpha(delta, goal);
    if (!instore(s).is_true() || !is_connected(s)) continue;
    res.answers.insert(render_answer(store(s), goal));
  }
  return res;
}

CorrectnessReport check_correctness(const Program& prog, const Goal& goal, int depth) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  StdOptions so;
  so.depth = depth - 1;
  so.count_introduce = false;
  AnswerSet a = data_sufficient_answers(prog, goal, so);
  AnswerSet b = sa_from_traces(prog, goal, depth);
  CorrectnessReport r;
  r.lhs = a.answers;
  r.rhs = b.answers;
  r.truncated = a.truncated || b.truncated;
  std::set_difference(r.lhs.begin(), r.lhs.end(), r.rhs.begin(), r.rhs.end(),
                      std::inserter(r.only_lhs, r.only_lhs.end()));
  std::set_difference(r.rhs.begin(), r.rhs.end(), r.lhs.begin(), r.lhs.end(),
                      std::inserter(r.only_rhs, r.only_rhs.end()));
  return r;
}

}  // namespace chrsem
