#include "chrsem/trace_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace chrsem {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "chrsem-traces";

// Gives every variable of `vars` without a label the next free label.
void extend_labelling(Labelling& l, const VarSet& vars) {
  std::uint32_t next = 0;
  for (const auto& [v, k] : l.label) next = std::max(next, k + 1);
  for (auto v : vars)
    if (!l.label.count(v)) l.label[v] = next++;
}

ojson tuple_json(const AbstractTuple& t, const Labelling& l, const Naming& n) {
  ojson j;
  j["in_store"] = render_store(t.c, l, n);
  j["assumptions"] = render_atom_list(t.K, l, n);
  j["stable"] = render_atom_list(t.H, l, n);
  j["out_store"] = render_store(t.d, l, n);
  return j;
}

ojson certificate_json(const CompositionCertificate& c, Labelling l, const Naming& n) {
  VarSet extra;
  for (const auto& d : c.discharges) {
    for (const auto& s : {free_vars(d.assumption), free_vars(d.stable), free_vars(d.at)})
      extra.insert(s.begin(), s.end());
  }
  extend_labelling(l, extra);
  ojson j;
  j["left"] = c.left;
  j["right"] = c.right;
  j["interleaving"] = c.interleaving;
  ojson ds = ojson::array();
  for (const auto& d : c.discharges) {
    ojson x;
    x["tuple"] = d.tuple;
    x["assumption"] = render_atom(d.assumption, l, n);
    x["stable"] = render_atom(d.stable.unindexed(), l, n);
    x["stable_index"] = d.stable.index.value_or(0);
    x["at"] = render_store(d.at, l, n);
    ds.push_back(std::move(x));
  }
  j["discharges"] = std::move(ds);
  return j;
}

}  // namespace

std::vector<std::string> goal_var_names(const Goal& g) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < g.vars.size(); ++i) {
    const std::string& n = i < g.var_names.size() ? g.var_names[i] : std::string("_");
    names.push_back(n == "_" ? "_A" + std::to_string(i) : n);
  }
  return names;
}

std::string dump_traces(const TraceFile& f) {
  Naming naming;
  naming.fixed_names = goal_var_names(f.parsed_goal);
  naming.prefix = "_";

  struct Entry {
    std::string key;
    ojson json;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < f.sequences.size(); ++i) {
    const auto& s = f.sequences[i];
    Structure st = to_structure(s);
    Labelling l = canonical_labelling(st, f.parsed_goal.vars);
    ojson seq;
    ojson tuples = ojson::array();
    for (const auto& t : s.tuples) tuples.push_back(tuple_json(t, l, naming));
    seq["tuples"] = std::move(tuples);
    if (i < f.certificates.size()) seq["certificate"] = certificate_json(f.certificates[i], l, naming);
    entries.push_back({render(st, l, Naming{}), std::move(seq)});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.key < b.key; });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const Entry& a, const Entry& b) { return a.key == b.key; }),
                entries.end());

  ojson j;
  j["format"] = kFormat;
  j["version"] = TraceFile::kVersion;
  j["program"] = f.program;
  j["goal"] = f.goal;
  j["goal_vars"] = naming.fixed_names;
  j["depth"] = f.depth;
  ojson seqs = ojson::array();
  for (auto& e : entries) seqs.push_back(std::move(e.json));
  j["sequences"] = std::move(seqs);
  return j.dump(2) + "\n";
}

namespace {

class SequenceReader {
 public:
  SequenceReader(GoalScope& scope) : scope_(scope), local_(scope), limit_(scope.max_id()) {}

  Store store(const ojson& j) {
    Store s = solve(Store::top(), parse_builtins(j.get<std::string>(), local_));
    return rename(s, aux());
  }

  Atom atom(const std::string& text) {
    // Stable atoms may be built-in items, so read them as goal items.
    auto items = parse_goal(text, local_).items;
    if (items.size() != 1) throw TraceFileError("expected a single atom: '" + text + "'");
    return substitute(aux(), items.front());
  }

  AtomMultiset atoms(const ojson& j) {
    AtomMultiset m;
    for (const auto& a : j) m.add(atom(a.get<std::string>()));
    return m;
  }

 private:
  // Variables created while reading this sequence move to fresh ids of the
  // shared scope, so that sequences never share local variables.
  const Substitution& aux() {
    for (VarId v = limit_ + 1; v <= local_.max_id(); ++v)
      if (!map_.count(v)) map_.emplace(v, Term::var(scope_.fresh()));
    return map_;
  }

  GoalScope& scope_;
  GoalScope local_;
  VarId limit_;
  Substitution map_;
};

std::string str_field(const ojson& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw TraceFileError(std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

TraceFile parse_traces(const std::string& text, GoalScope& scope) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw TraceFileError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw TraceFileError("trace file must be a JSON object");
  if (str_field(j, "format") != kFormat) throw TraceFileError("not a chrsem trace file");
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw TraceFileError("missing version");
  if (j["version"].get<int>() != TraceFile::kVersion)
    throw TraceFileError("unsupported trace file version " + j["version"].dump());

  TraceFile f;
  try {
    f.program = str_field(j, "program");
    f.goal = str_field(j, "goal");
    if (!j.contains("depth") || !j["depth"].is_number_integer())
      throw TraceFileError("missing depth");
    f.depth = j["depth"].get<int>();
    parse_program(f.program);
    f.parsed_goal = parse_goal(f.goal, scope);
    auto names = goal_var_names(f.parsed_goal);
    for (std::size_t i = 0; i < names.size(); ++i)
      if (f.parsed_goal.var_names[i] == "_") scope.bind(names[i], f.parsed_goal.vars[i]);
    if (j.contains("goal_vars") && j["goal_vars"].get<std::vector<std::string>>() != names)
      throw TraceFileError("goal_vars do not match the goal");
    if (!j.contains("sequences") || !j["sequences"].is_array())
      throw TraceFileError("missing sequences");

    std::size_t si = 0;
    for (const auto& sj : j["sequences"]) {
      ++si;
      SequenceReader rd(scope);
      AbstractSequence s;
      s.goal = f.parsed_goal;
      for (const auto& tj : sj.at("tuples")) {
        AbstractTuple t;
        t.c = rd.store(tj.at("in_store"));
        t.K = rd.atoms(tj.at("assumptions"));
        t.H = rd.atoms(tj.at("stable"));
        t.d = rd.store(tj.at("out_store"));
        s.tuples.push_back(std::move(t));
      }
      if (auto bad = validate_domain(s))
        throw TraceFileError("sequence " + std::to_string(si) + ", tuple " +
                             std::to_string(bad->tuple) + ": " + bad->what);
      if (sj.contains("certificate")) {
        const auto& cj = sj["certificate"];
        CompositionCertificate c;
        c.left = cj.at("left").get<std::size_t>();
        c.right = cj.at("right").get<std::size_t>();
        c.interleaving = cj.at("interleaving").get<std::string>();
        for (const auto& dj : cj.at("discharges")) {
          Discharge d;
          d.tuple = dj.at("tuple").get<std::size_t>();
          d.assumption = rd.atom(dj.at("assumption").get<std::string>());
          d.stable = rd.atom(dj.at("stable").get<std::string>())
                         .with_index(dj.at("stable_index").get<std::uint32_t>());
          d.at = rd.store(dj.at("at"));
          c.discharges.push_back(std::move(d));
        }
        f.certificates.resize(f.sequences.size());
        f.certificates.push_back(std::move(c));
      }
      f.sequences.push_back(std::move(s));
    }
  } catch (const ParseError& e) {
    throw TraceFileError(std::string("parse error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw TraceFileError(std::string("malformed trace file: ") + e.what());
  }
  return f;
}

void save_traces(const std::string& path, const TraceFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump_traces(f);
  if (!out) throw std::runtime_error("cannot write " + path);
}

TraceFile load_traces(const std::string& path, GoalScope& scope) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_traces(ss.str(), scope);
}

}  // namespace chrsem
