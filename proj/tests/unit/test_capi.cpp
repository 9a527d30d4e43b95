// C API and command-line behaviour. Links only against libchrsem.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chrsem/chrsem.h"
#include "json.hpp"

namespace {

struct Session {
  chr_session* s = nullptr;
  Session() { REQUIRE(chr_session_create(&s) == CHR_OK); }
  ~Session() { chr_session_destroy(s); }
};

struct Str {
  char* p = nullptr;
  ~Str() { chr_free_string(p); }
  std::string str() const { return p ? p : ""; }
};

const char* kGh = "gh @ g(X), h(Y) <=> true | X = Y.";

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("chrsem_cli_" + name);
}

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  auto out = tmp("stdout.txt");
  std::string cmd = std::string(CHRSEM_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, ss.str()};
}

std::string program_file() {
  auto p = tmp("gh.chr");
  std::ofstream(p) << kGh << "\n";
  return p.string();
}

}  // namespace

TEST_CASE("sessions report errors by code and message") {
  Session s;
  CHECK(chr_load_program(s.s, "a(X) <=> ") == CHR_E_PARSE);
  CHECK(std::string(chr_last_error(s.s)).size() > 0);
  CHECK(chr_load_program_file(s.s, "/nonexistent/p.chr") == CHR_E_IO);
  Str out;
  CHECK(chr_answers(s.s, "g(U)", 0, nullptr, &out.p) == CHR_E_USAGE);
  CHECK(chr_load_program(s.s, kGh) == CHR_OK);
  CHECK(std::string(chr_last_error(s.s)).empty());
  chr_options o;
  chr_options_init(&o);
  CHECK(o.depth == 6);
  o.depth = 0;
  CHECK(chr_answers(s.s, "g(U)", 0, &o, &out.p) == CHR_E_USAGE);
  CHECK(chr_answers(s.s, "g(U", 0, nullptr, &out.p) == CHR_E_PARSE);
  CHECK(chr_answers(nullptr, "g(U)", 0, nullptr, &out.p) == CHR_E_USAGE);
  CHECK(std::string(chr_version()).size() > 0);
}

TEST_CASE("answers as JSON") {
  Session s;
  REQUIRE(chr_load_program(s.s, kGh) == CHR_OK);
  chr_options o;
  chr_options_init(&o);
  o.depth = 8;
  Str out;
  REQUIRE(chr_answers(s.s, "g(U), h(V)", 0, &o, &out.p) == CHR_OK);
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["answers"] == nlohmann::json::array({"U = V"}));
  CHECK(j["mode"] == "sa");
  Str qa;
  REQUIRE(chr_answers(s.s, "g(U)", 1, &o, &qa.p) == CHR_OK);
  CHECK(nlohmann::json::parse(qa.str())["answers"] == nlohmann::json::array({"g(U)"}));
}

TEST_CASE("traces, compose and the checks") {
  Session s;
  REQUIRE(chr_load_program(s.s, kGh) == CHR_OK);
  chr_options o;
  chr_options_init(&o);
  o.depth = 4;
  Str t1, t2, composed;
  REQUIRE(chr_traces(s.s, "g(U)", &o, &t1.p) == CHR_OK);
  REQUIRE(chr_traces(s.s, "h(V)", &o, &t2.p) == CHR_OK);
  REQUIRE(chr_compose(s.s, t1.p, t2.p, &composed.p) == CHR_OK);
  auto j = nlohmann::json::parse(composed.str());
  CHECK(j["goal"] == "g(U), h(V)");
  for (const auto& seq : j["sequences"]) CHECK(seq.contains("certificate"));

  auto bad = nlohmann::json::parse(t1.str());
  bad["sequences"][0]["tuples"][0]["stable"].push_back("k(U)");
  if (bad["sequences"][0]["tuples"].size() == 1) bad["sequences"][0]["tuples"][0]["assumptions"].push_back("k(U)");
  Str none;
  CHECK(chr_compose(s.s, bad.dump().c_str(), t2.p, &none.p) == CHR_E_INVARIANT);
  CHECK(std::string(chr_last_error(s.s)).rfind("sequence 1, tuple", 0) == 0);
  CHECK(chr_compose(s.s, "{}", t2.p, &none.p) == CHR_E_PARSE);

  int equal = 0;
  Str rep;
  REQUIRE(chr_check_compositionality(s.s, "g(U)", "h(V)", &o, &equal, &rep.p) == CHR_OK);
  CHECK(equal == 1);
  auto r = nlohmann::json::parse(rep.str());
  for (const char* k : {"lhs", "rhs", "only_lhs", "only_rhs", "truncated"}) CHECK(r.contains(k));
  Str corr;
  REQUIRE(chr_check_correctness(s.s, "g(U), h(V)", &o, &equal, &corr.p) == CHR_OK);
  CHECK(equal == 1);
}

TEST_CASE("the harness over an empty corpus") {
  auto dir = tmp("empty");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "manifest.json") << R"({"programs": []})";
  Session s;
  int pass = 0;
  Str table, json;
  REQUIRE(chr_run_harness(s.s, dir.string().c_str(), nullptr, &pass, &table.p, &json.p) == CHR_OK);
  CHECK(pass == 1);
  CHECK(table.str().empty());
  CHECK(nlohmann::json::parse(json.str())["criteria"].empty());
  CHECK(chr_run_harness(s.s, "/nonexistent", nullptr, &pass, nullptr, nullptr) == CHR_E_IO);
  std::filesystem::remove_all(dir);
}

TEST_CASE("command line exit codes and output") {
  std::string p = program_file();
  auto r = cli("answers --program " + p + " --goal \"g(U),h(V)\" --mode sa --depth 8");
  CHECK(r.code == 0);
  CHECK(r.out == "U = V\n");

  r = cli("check-comp --program " + p + " --g1 \"g(U)\" --g2 \"h(V)\" --depth 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("only_") == std::string::npos);

  auto mutant = tmp("mutant.chr");
  std::ofstream(mutant) << "gh @ g(X), h(Y) <=> true | X = a.\n";
  CHECK(cli("check-correct --program " + mutant.string() + " --goal \"g(U), h(V)\"").code == 0);

  CHECK(cli("answers --program /nonexistent.chr --goal \"g(U)\"").code == 2);
  CHECK(cli("answers --program " + p + " --goal \"g(U\"").code == 2);
  CHECK(cli("answers --program " + p + " --goal \"g(U)\" --mode xx").code == 2);
  CHECK(cli("answers --program " + p).code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("--help").code == 0);

  auto t1 = tmp("t1.json"), t2 = tmp("t2.json"), t12 = tmp("t12.json");
  CHECK(cli("traces --program " + p + " --goal \"g(U)\" --depth 4 --json " + t1.string()).code == 0);
  CHECK(cli("traces --program " + p + " --goal \"h(V)\" --depth 4 --json " + t2.string()).code == 0);
  CHECK(cli("compose " + t1.string() + " " + t2.string() + " --json " + t12.string()).code == 0);
  CHECK(std::filesystem::file_size(t12) > 0);
  CHECK(cli("compose " + t1.string() + " /nonexistent.json").code == 2);

  // Same flags, same bytes.
  auto a = cli("traces --program " + p + " --goal \"g(U), h(V)\" --depth 5 --seed 3");
  auto b = cli("traces --program " + p + " --goal \"g(U), h(V)\" --depth 5 --seed 3");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}
