// chrsem: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chrsem/chrsem.h"
#include "json.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailed = 1;
constexpr int kError = 2;

struct Flags {
  std::string program, goal, g1, g2, mode = "sa", json;
  std::string files[2];
  int depth = 6, jobs = 1;
  unsigned long long seed = 0;
  bool naive = false;
};

using Session = std::unique_ptr<chr_session, decltype(&chr_session_destroy)>;

struct Owned {
  char* p = nullptr;
  ~Owned() { chr_free_string(p); }
  std::string str() const { return p ? p : ""; }
};

int fail(const chr_session* s, const char* what) {
  std::cerr << "chrsem: " << what << ": " << chr_last_error(s) << "\n";
  return kError;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Writes `text` to --json when given, otherwise to stdout.
int emit(const Flags& f, const std::string& text) {
  if (f.json.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(f.json, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "chrsem: cannot write " << f.json << "\n";
    return kError;
  }
  return kOk;
}

chr_options options(const Flags& f) {
  chr_options o;
  chr_options_init(&o);
  o.depth = f.depth;
  o.jobs = f.jobs;
  o.naive = f.naive ? 1 : 0;
  o.seed = f.seed;
  return o;
}

Session open_program(const Flags& f, int& rc) {
  chr_session* raw = nullptr;
  rc = chr_session_create(&raw) == CHR_OK ? kOk : kError;
  Session s(raw, &chr_session_destroy);
  if (rc == kOk && chr_load_program_file(s.get(), f.program.c_str()) != CHR_OK)
    rc = fail(s.get(), f.program.c_str());
  return s;
}

void print_report(const std::string& json) {
  auto j = nlohmann::ordered_json::parse(json);
  std::cout << "lhs " << j["lhs"].size() << ", rhs " << j["rhs"].size() << "\n";
  for (const auto& side : {"only_lhs", "only_rhs"})
    for (const auto& x : j[side]) std::cout << side << ": " << x.get<std::string>() << "\n";
  if (j["truncated"].get<bool>())
    std::cout << "note: exploration hit the depth bound before a fixpoint\n";
}

int cmd_answers(const Flags& f) {
  int rc;
  Session s = open_program(f, rc);
  if (rc) return rc;
  Owned out;
  auto o = options(f);
  if (chr_answers(s.get(), f.goal.c_str(), f.mode == "qa", &o, &out.p) != CHR_OK)
    return fail(s.get(), "answers");
  if (!f.json.empty()) return emit(f, out.str());
  auto j = nlohmann::ordered_json::parse(out.str());
  for (const auto& a : j["answers"]) std::cout << a.get<std::string>() << "\n";
  if (j["truncated"].get<bool>()) std::cerr << "note: depth bound reached\n";
  return kOk;
}

int cmd_traces(const Flags& f) {
  int rc;
  Session s = open_program(f, rc);
  if (rc) return rc;
  Owned out;
  auto o = options(f);
  if (chr_traces(s.get(), f.goal.c_str(), &o, &out.p) != CHR_OK) return fail(s.get(), "traces");
  return emit(f, out.str());
}

int cmd_compose(const Flags& f) {
  std::string t1, t2;
  for (int i = 0; i < 2; ++i)
    if (!read_file(f.files[i], i == 0 ? t1 : t2)) {
      std::cerr << "chrsem: cannot read " << f.files[i] << "\n";
      return kError;
    }
  chr_session* raw = nullptr;
  if (chr_session_create(&raw) != CHR_OK) return kError;
  Session s(raw, &chr_session_destroy);
  Owned out;
  if (chr_compose(s.get(), t1.c_str(), t2.c_str(), &out.p) != CHR_OK) return fail(s.get(), "compose");
  return emit(f, out.str());
}

int cmd_check_comp(const Flags& f) {
  int rc;
  Session s = open_program(f, rc);
  if (rc) return rc;
  Owned out;
  int equal = 0;
  auto o = options(f);
  if (chr_check_compositionality(s.get(), f.g1.c_str(), f.g2.c_str(), &o, &equal, &out.p) !=
      CHR_OK)
    return fail(s.get(), "check-comp");
  if (!f.json.empty() && emit(f, out.str()) != kOk) return kError;
  print_report(out.str());
  return equal ? kOk : kPropertyFailed;
}

int cmd_check_correct(const Flags& f) {
  int rc;
  Session s = open_program(f, rc);
  if (rc) return rc;
  Owned out;
  int equal = 0;
  auto o = options(f);
  if (chr_check_correctness(s.get(), f.goal.c_str(), &o, &equal, &out.p) != CHR_OK)
    return fail(s.get(), "check-correct");
  if (!f.json.empty() && emit(f, out.str()) != kOk) return kError;
  print_report(out.str());
  return equal ? kOk : kPropertyFailed;
}

int cmd_harness(const Flags& f) {
  chr_session* raw = nullptr;
  if (chr_session_create(&raw) != CHR_OK) return kError;
  Session s(raw, &chr_session_destroy);
  Owned table, report;
  int pass = 0;
  auto o = options(f);
  if (chr_run_harness(s.get(), nullptr, &o, &pass, &table.p, &report.p) != CHR_OK)
    return fail(s.get(), "harness");
  std::cout << table.str();
  if (!f.json.empty() && emit(f, report.str()) != kOk) return kError;
  return pass ? kOk : kPropertyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  CLI::App app{"Trace semantics workbench for CHR programs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(chr_version()));

  auto common = [&](CLI::App* sub, bool program) {
    if (program) sub->add_option("--program", f.program, "CHR program file")->required();
    sub->add_option("--depth", f.depth, "Maximum number of transitions")
        ->check(CLI::PositiveNumber);
    sub->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "Offset of fresh variable blocks");
    sub->add_flag("--naive", f.naive, "Naive propagation (no effect on simplification)");
    sub->add_option("--json", f.json, "Write JSON output to this file");
  };

  auto* answers = app.add_subcommand("answers", "Answers of the standard semantics");
  common(answers, true);
  answers->add_option("--goal", f.goal, "Goal")->required();
  answers->add_option("--mode", f.mode, "sa (data sufficient) or qa (qualified)")
      ->check(CLI::IsMember({"sa", "qa"}));

  auto* traces = app.add_subcommand("traces", "Dump the abstract sequences of a goal");
  common(traces, true);
  traces->add_option("--goal", f.goal, "Goal")->required();

  auto* compose = app.add_subcommand("compose", "Compose two trace files");
  common(compose, false);
  compose->add_option("first", f.files[0], "Trace file of the first goal")->required();
  compose->add_option("second", f.files[1], "Trace file of the second goal")->required();

  auto* check_comp = app.add_subcommand("check-comp", "Compare traces of G1,G2 with composition");
  common(check_comp, true);
  check_comp->add_option("--g1", f.g1, "First goal")->required();
  check_comp->add_option("--g2", f.g2, "Second goal")->required();

  auto* check_correct =
      app.add_subcommand("check-correct", "Compare standard answers with connected traces");
  common(check_correct, true);
  check_correct->add_option("--goal", f.goal, "Goal")->required();

  auto* harness = app.add_subcommand("harness", "Run the corpus harness ($CHR_CORPUS_DIR)");
  common(harness, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*answers) return cmd_answers(f);
    if (*traces) return cmd_traces(f);
    if (*compose) return cmd_compose(f);
    if (*check_comp) return cmd_check_comp(f);
    if (*check_correct) return cmd_check_correct(f);
    if (*harness) return cmd_harness(f);
  } catch (const std::exception& e) {
    std::cerr << "chrsem: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
