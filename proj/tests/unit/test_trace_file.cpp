#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "chrsem/harness.hpp"
#include "chrsem/trace_file.hpp"
#include "json.hpp"

using namespace chrsem;

namespace {

TraceFile make(const char* prog, const char* goal, int depth) {
  TraceFile f;
  f.program = prog;
  f.goal = goal;
  f.depth = depth;
  f.parsed_goal = parse_goal(goal);
  TraceOptions o;
  o.depth = depth;
  for (const auto& d : enumerate_sprime(parse_program(prog), f.parsed_goal, o).sequences)
    f.sequences.push_back(alpha(d, f.parsed_goal));
  return f;
}

const char* kGh = "gh @ g(X), h(Y) <=> true | X = Y.";

std::string reload(const std::string& text) {
  GoalScope sc;
  return dump_traces(parse_traces(text, sc));
}

}  // namespace

TEST_CASE("dumps round-trip exactly") {
  const char* cases[][2] = {{kGh, "g(U), h(V)"},
                            {"p(N) <=> tok(N).\ntok(N), want(M) <=> N = M.", "p(U), want(V)"},
                            {"split @ mk(P) <=> P = pr(A, B), fst(A), snd(B).", "mk(P), fst(_)"}};
  for (const auto& c : cases) {
    std::string text = dump_traces(make(c[0], c[1], 4));
    INFO(c[1]);
    CHECK(reload(text) == text);
    CHECK(text.find('\r') == std::string::npos);
  }
}

TEST_CASE("dumps are deterministic across variable bases") {
  TraceFile a = make(kGh, "g(U), h(V)", 4);
  TraceFile b = a;
  b.sequences.clear();
  TraceOptions o;
  o.depth = 4;
  o.var_base = 500;
  for (const auto& d : enumerate_sprime(parse_program(kGh), b.parsed_goal, o).sequences)
    b.sequences.push_back(alpha(d, b.parsed_goal));
  CHECK(dump_traces(a) == dump_traces(b));
}

TEST_CASE("save and load through a file") {
  auto path = std::filesystem::temp_directory_path() / "chrsem_roundtrip.json";
  TraceFile f = make(kGh, "g(U)", 3);
  save_traces(path.string(), f);
  GoalScope sc;
  TraceFile back = load_traces(path.string(), sc);
  CHECK(back.sequences.size() == f.sequences.size());
  CHECK(back.goal == "g(U)");
  CHECK(back.depth == 3);
  CHECK(dump_traces(back) == dump_traces(f));
  std::filesystem::remove(path);
  CHECK_THROWS(load_traces(path.string(), sc));
}

TEST_CASE("a stable atom that disappears is rejected with its position") {
  auto j = nlohmann::ordered_json::parse(dump_traces(make(kGh, "g(U)", 3)));
  std::size_t target = 0;
  for (std::size_t i = 0; i < j["sequences"].size(); ++i)
    if (j["sequences"][i]["tuples"].size() >= 2) {
      target = i;
      break;
    }
  j["sequences"][target]["tuples"][0]["stable"].push_back("k(U)");
  GoalScope sc;
  try {
    parse_traces(j.dump(), sc);
    FAIL("corrupted file accepted");
  } catch (const TraceFileError& e) {
    std::string want = "sequence " + std::to_string(target + 1) + ", tuple 1:";
    CHECK(std::string(e.what()).rfind(want, 0) == 0);
  }
}

TEST_CASE("malformed files are rejected") {
  std::string good = dump_traces(make(kGh, "g(U)", 2));
  auto j = nlohmann::ordered_json::parse(good);
  GoalScope sc;
  CHECK_THROWS_AS(parse_traces("{", sc), TraceFileError);
  CHECK_THROWS_AS(parse_traces("[]", sc), TraceFileError);

  auto v = j;
  v["version"] = 2;
  CHECK_THROWS_WITH_AS(parse_traces(v.dump(), sc), doctest::Contains("version"), TraceFileError);
  v = j;
  v.erase("version");
  CHECK_THROWS_AS(parse_traces(v.dump(), sc), TraceFileError);
  v = j;
  v["sequences"][0]["tuples"][0]["in_store"] = "U = ";
  CHECK_THROWS_AS(parse_traces(v.dump(), sc), TraceFileError);
  v = j;
  v["sequences"][0]["tuples"][0].erase("out_store");
  CHECK_THROWS_AS(parse_traces(v.dump(), sc), TraceFileError);
  v = j;
  v["goal_vars"] = {"W"};
  CHECK_THROWS_AS(parse_traces(v.dump(), sc), TraceFileError);
}

TEST_CASE("certificates are stored with their sequences") {
  GoalScope sc;
  TraceFile f;
  f.program = kGh;
  f.goal = "g(U), h(U)";
  f.depth = 2;
  f.parsed_goal = parse_goal(f.goal, sc);
  AbstractSequence s;
  s.goal = f.parsed_goal;
  s.tuples = {AbstractTuple{Store::top(), {}, {}, Store::top(), {}}};
  f.sequences = {s};
  CompositionCertificate c;
  c.left = 1;
  c.right = 2;
  c.interleaving = "";
  Discharge d;
  d.tuple = 1;
  d.assumption = parse_goal("h(U)", sc).items[0];
  d.stable = d.assumption.with_index(0);
  d.at = Store::top();
  c.discharges = {d};
  f.certificates = {c};
  std::string text = dump_traces(f);
  GoalScope sc2;
  TraceFile back = parse_traces(text, sc2);
  REQUIRE(back.certificates.size() == 1);
  CHECK(back.certificates[0].left == 1);
  CHECK(back.certificates[0].right == 2);
  REQUIRE(back.certificates[0].discharges.size() == 1);
  CHECK(back.certificates[0].discharges[0].stable.index == std::optional<std::uint32_t>(0));
  CHECK(dump_traces(back) == text);
}

TEST_CASE("the bundled corpus loads") {
  Corpus c = load_corpus(default_corpus_dir());
  CHECK(c.programs.size() >= 5);
  for (const auto& p : c.programs) {
    CHECK(p.splits.size() >= 3);
    CHECK(p.program.simplification_only());
  }
  auto sig = corpus_signature(c);
  CHECK(std::find(sig.begin(), sig.end(), std::make_pair(Symbol("pr"), std::size_t{2})) !=
        sig.end());
}

TEST_CASE("an empty corpus gives an empty report") {
  auto dir = std::filesystem::temp_directory_path() / "chrsem_empty_corpus";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "manifest.json") << R"({"programs": []})";
  Corpus c = load_corpus(dir.string());
  auto rep = run_harness(c, HarnessOptions{});
  CHECK(rep.criteria.empty());
  CHECK(rep.all_pass());
  CHECK(rep.table().empty());
  std::filesystem::remove_all(dir);
  CHECK_THROWS(load_corpus(dir.string()));
}

TEST_CASE("the example criterion passes on its own") {
  auto r = criterion_example();
  CHECK(r.pass);
  CHECK(r.id == 1);
}
