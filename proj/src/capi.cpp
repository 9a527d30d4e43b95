#include "chrsem/chrsem.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "chrsem/harness.hpp"
#include "chrsem/trace_file.hpp"
#include "json.hpp"

using ojson = nlohmann::ordered_json;

struct chr_session {
  std::string error;
  std::string source;
  std::optional<chrsem::Program> program;
};

namespace {

class Failure {
 public:
  Failure(chr_status code, std::string msg) : code(code), msg(std::move(msg)) {}
  chr_status code;
  std::string msg;
};

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

const chrsem::Program& need_program(chr_session* s) {
  if (!s->program) throw Failure(CHR_E_USAGE, "no program loaded");
  return *s->program;
}

chr_options opts_or_default(const chr_options* o) {
  chr_options d;
  chr_options_init(&d);
  if (!o) return d;
  if (o->depth < 1) throw Failure(CHR_E_USAGE, "depth must be at least 1");
  if (o->jobs < 1) throw Failure(CHR_E_USAGE, "jobs must be at least 1");
  return *o;
}

const char* need_str(const char* p, const char* what) {
  if (!p) throw Failure(CHR_E_USAGE, std::string(what) + " is NULL");
  return p;
}

ojson string_array(const std::set<std::string>& s) {
  ojson a = ojson::array();
  for (const auto& x : s) a.push_back(x);
  return a;
}

// Runs `f`, translating exceptions into status codes and the session error.
template <class F>
chr_status guarded(chr_session* s, F&& f) {
  if (!s) return CHR_E_USAGE;
  s->error.clear();
  try {
    f();
    return CHR_OK;
  } catch (const Failure& e) {
    s->error = e.msg;
    return e.code;
  } catch (const chrsem::ParseError& e) {
    s->error = e.what();
    return CHR_E_PARSE;
  } catch (const chrsem::TraceFileError& e) {
    s->error = e.what();
    return std::strstr(e.what(), "sequence ") == e.what() ? CHR_E_INVARIANT : CHR_E_PARSE;
  } catch (const std::invalid_argument& e) {
    s->error = e.what();
    return CHR_E_USAGE;
  } catch (const std::exception& e) {
    s->error = e.what();
    return CHR_E_INTERNAL;
  } catch (...) {
    s->error = "unknown error";
    return CHR_E_INTERNAL;
  }
}

}  // namespace

extern "C" {

void chr_options_init(chr_options* o) {
  if (!o) return;
  o->depth = 6;
  o->naive = 0;
  o->jobs = 1;
  o->seed = 0;
}

const char* chr_version(void) { return "0.1.0"; }

chr_status chr_session_create(chr_session** out) {
  if (!out) return CHR_E_USAGE;
  *out = new (std::nothrow) chr_session();
  return *out ? CHR_OK : CHR_E_INTERNAL;
}

void chr_session_destroy(chr_session* s) { delete s; }

const char* chr_last_error(const chr_session* s) { return s ? s->error.c_str() : "no session"; }

void chr_free_string(char* str) { std::free(str); }

chr_status chr_load_program(chr_session* s, const char* text) {
  return guarded(s, [&] {
    std::string src = need_str(text, "program text");
    s->program = chrsem::parse_program(src);
    s->source = std::move(src);
  });
}

chr_status chr_load_program_file(chr_session* s, const char* path) {
  return guarded(s, [&] {
    std::ifstream in(need_str(path, "path"), std::ios::binary);
    if (!in) throw Failure(CHR_E_IO, std::string("cannot read ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    s->program = chrsem::parse_program(ss.str());
    s->source = ss.str();
  });
}

chr_status chr_answers(chr_session* s, const char* goal, int qualified, const chr_options* o,
                       char** json_out) {
  return guarded(s, [&] {
    const auto& prog = need_program(s);
    chr_options opt = opts_or_default(o);
    chrsem::StdOptions so;
    so.depth = opt.depth;
    so.naive = opt.naive != 0;
    chrsem::Goal g = chrsem::parse_goal(need_str(goal, "goal"));
    auto res = qualified ? chrsem::qualified_answers(prog, g, so)
                         : chrsem::data_sufficient_answers(prog, g, so);
    ojson j;
    j["goal"] = goal;
    j["mode"] = qualified ? "qa" : "sa";
    j["depth"] = opt.depth;
    j["answers"] = string_array(res.answers);
    j["truncated"] = res.truncated;
    put(json_out, j.dump(2) + "\n");
  });
}

chr_status chr_traces(chr_session* s, const char* goal, const chr_options* o, char** json_out) {
  return guarded(s, [&] {
    const auto& prog = need_program(s);
    chr_options opt = opts_or_default(o);
    chrsem::Goal g = chrsem::parse_goal(need_str(goal, "goal"));
    chrsem::TraceOptions to;
    to.depth = opt.depth;
    if (opt.seed) {
      chrsem::VarId top = 0;
      for (auto v : g.vars) top = std::max(top, v);
      to.var_base = top + 1 + static_cast<chrsem::VarId>(opt.seed);
    }
    chrsem::TraceFile f;
    f.program = s->source;
    f.goal = goal;
    f.depth = opt.depth;
    f.parsed_goal = g;
    for (const auto& delta : chrsem::enumerate_sprime(prog, g, to).sequences)
      f.sequences.push_back(chrsem::alpha(delta, g));
    put(json_out, chrsem::dump_traces(f));
  });
}

chr_status chr_compose(chr_session* s, const char* traces1, const char* traces2,
                       char** json_out) {
  return guarded(s, [&] {
    chrsem::GoalScope scope;
    chrsem::TraceFile f1 = chrsem::parse_traces(need_str(traces1, "first trace file"), scope);
    chrsem::TraceFile f2 = chrsem::parse_traces(need_str(traces2, "second trace file"), scope);
    if (f1.program != f2.program)
      throw Failure(CHR_E_USAGE, "trace files belong to different programs");
    chrsem::TraceFile out;
    out.program = f1.program;
    out.goal = f1.goal + ", " + f2.goal;
    out.depth = f1.depth + f2.depth - 1;
    out.parsed_goal = chrsem::combine(f1.parsed_goal, f2.parsed_goal);
    for (const auto& n : out.parsed_goal.var_names)
      if (n == "_") throw Failure(CHR_E_USAGE, "anonymous goal variables cannot be composed");
    for (auto& c : chrsem::compose_sets(f1.sequences, f2.sequences)) {
      out.sequences.push_back(std::move(c.seq));
      out.certificates.push_back(std::move(c.cert));
    }
    put(json_out, chrsem::dump_traces(out));
  });
}

chr_status chr_check_compositionality(chr_session* s, const char* g1, const char* g2,
                                      const chr_options* o, int* equal, char** json_out) {
  return guarded(s, [&] {
    const auto& prog = need_program(s);
    chr_options opt = opts_or_default(o);
    chrsem::GoalScope scope;
    chrsem::Goal a = chrsem::parse_goal(need_str(g1, "g1"), scope);
    chrsem::Goal b = chrsem::parse_goal(need_str(g2, "g2"), scope);
    chrsem::CompositionOptions co;
    co.depth = opt.depth;
    co.jobs = opt.jobs;
    co.seed = static_cast<chrsem::VarId>(opt.seed);
    auto rep = chrsem::check_compositionality(prog, a, b, co);
    if (equal) *equal = rep.equal() ? 1 : 0;
    ojson j;
    j["lhs"] = string_array(rep.lhs);
    j["rhs"] = string_array(rep.rhs);
    j["only_lhs"] = string_array(rep.only_lhs);
    j["only_rhs"] = string_array(rep.only_rhs);
    j["truncated"] = rep.truncated;
    put(json_out, j.dump(2) + "\n");
  });
}

chr_status chr_check_correctness(chr_session* s, const char* goal, const chr_options* o,
                                 int* equal, char** json_out) {
  return guarded(s, [&] {
    const auto& prog = need_program(s);
    chr_options opt = opts_or_default(o);
    auto rep = chrsem::check_correctness(prog, chrsem::parse_goal(need_str(goal, "goal")), opt.depth);
    if (equal) *equal = rep.equal() ? 1 : 0;
    ojson j;
    j["lhs"] = string_array(rep.lhs);
    j["rhs"] = string_array(rep.rhs);
    j["only_lhs"] = string_array(rep.only_lhs);
    j["only_rhs"] = string_array(rep.only_rhs);
    j["truncated"] = rep.truncated;
    put(json_out, j.dump(2) + "\n");
  });
}

chr_status chr_run_harness(chr_session* s, const char* corpus_dir, const chr_options* o,
                           int* all_pass, char** table_out, char** json_out) {
  return guarded(s, [&] {
    chr_options opt = opts_or_default(o);
    std::string dir = corpus_dir ? corpus_dir : chrsem::default_corpus_dir();
    chrsem::Corpus c;
    {
      std::ifstream probe(dir + "/manifest.json");
      if (!probe) throw Failure(CHR_E_IO, "no manifest.json in " + dir);
    }
    c = chrsem::load_corpus(dir);
    chrsem::HarnessOptions ho;
    ho.jobs = opt.jobs;
    ho.seed = static_cast<chrsem::VarId>(opt.seed);
    auto rep = chrsem::run_harness(c, ho);
    if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
    put(table_out, rep.table());
    put(json_out, rep.json());
  });
}

}  // extern "C"
