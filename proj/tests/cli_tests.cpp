// The command-line driver and the differential harness behind it: exit codes,
// frozen scenario outputs on both execution paths, byte determinism, the
// JSON-lines report, and verdict reproducibility.
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "albert/cli.hpp"
#include "albert/differential.hpp"
#include "albert/parser.hpp"
#include "albert/typer.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"

using namespace albert;
using namespace albert::test;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

// A fresh scratch directory per test run.
fs::path scratch_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("albert_cli_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

const std::string kVotingSuccess =
    "{ operations = ([] : list operation); store = { threshold = (100 : "
    "mutez); votes = ({ \"no\" -> 0; \"yes\" -> 1 } : map string nat) } }\n";

}  // namespace

TEST_CASE("typecheck succeeds quietly on every corpus contract") {
  for (const auto* name : {"voting.alb", "identity.alb", "choice.alb"}) {
    CAPTURE(name);
    CliResult r = run_cli({"typecheck", fixture_path(name)});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.empty());
  }
}

TEST_CASE("typecheck rejects a double use and speaks of linearity") {
  fs::path dir = scratch_dir();
  fs::path bad = dir / "bad.alb";
  write_file(bad,
             "def f : { x : nat } -> { y : nat ; z : nat } =\n"
             "  y = x ;\n  z = x\n");
  CliResult r = run_cli({"typecheck", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.find("albertc: ") == 0);
  CHECK(r.err.find("linear") != std::string::npos);
  CHECK(r.err.find("bad.alb:3:") != std::string::npos);  // position of 2nd use
}

TEST_CASE("compile writes exactly the golden script") {
  const std::string golden = read_file(golden_path("voting.tz"));
  fs::path out = scratch_dir() / "voting.tz";

  CliResult to_file =
      run_cli({"compile", fixture_path("voting.alb"), "-o", out.string()});
  CHECK(to_file.code == 0);
  CHECK(read_file(out.string()) == golden);

  CliResult to_stdout =
      run_cli({"compile", fixture_path("voting.alb"), "-o", "-"});
  CHECK(to_stdout.code == 0);
  CHECK(to_stdout.out == golden);
}

TEST_CASE("compile derives the default output path from the source path") {
  fs::path dir = scratch_dir();
  fs::path src = dir / "v.alb";
  write_file(src, read_file(fixture_path("voting.alb")));
  CliResult r = run_cli({"compile", src.string()});
  CHECK(r.code == 0);
  CHECK(read_file((dir / "v.tz").string()) == read_file(golden_path("voting.tz")));
}

TEST_CASE("run and simulate agree on all three voting scenarios") {
  struct Scenario {
    const char* ballot;
    const char* amount;
    int code;
    std::string output;
  };
  const Scenario scenarios[] = {
      {"yes", "100", 0, kVotingSuccess},
      {"yes", "99", 2, "failure: \"you are so cheap!\"\n"},
      {"maybe", "100", 2, "failure: \"assert_some\"\n"},
  };
  for (const auto& s : scenarios) {
    CAPTURE(s.ballot);
    CAPTURE(s.amount);
    for (const auto* cmd : {"run", "simulate"}) {
      CAPTURE(cmd);
      CliResult r = run_cli({cmd, fixture_path("voting.alb"), "--entry",
                             "guarded_vote", "--amount", s.amount, "--input",
                             voting_input(s.ballot)});
      CHECK(r.code == s.code);
      CHECK(r.out == s.output);
      CHECK(r.err.empty());
    }
  }
}

TEST_CASE("the entry flag defaults to the last function defined") {
  CliResult r = run_cli({"run", fixture_path("voting.alb"), "--amount", "100",
                         "--input", voting_input("yes")});
  CHECK(r.code == 0);
  CHECK(r.out == kVotingSuccess);  // guarded_vote, not vote
}

TEST_CASE("user mistakes exit with code one and a diagnostic") {
  CHECK(run_cli({"typecheck", "/nonexistent/ghost.alb"}).code == 1);
  CHECK(run_cli({"run", fixture_path("voting.alb"), "--entry", "ghost",
                 "--input", voting_input("yes")})
            .code == 1);
  CHECK(run_cli({"run", fixture_path("voting.alb"), "--input", "{{{"}).code == 1);
  CHECK(run_cli({"run", fixture_path("voting.alb")}).code == 1);  // no input
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({}).code == 1);

  CliResult missing = run_cli({"typecheck", "/nonexistent/ghost.alb"});
  CHECK(missing.err.find("ghost.alb") != std::string::npos);
}

TEST_CASE("help is not an error") {
  CliResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("albertc") != std::string::npos);
}

TEST_CASE("the typed dump prints per-instruction environments") {
  CliResult r = run_cli({"typecheck", fixture_path("voting.alb"), "--dump-typed"});
  CHECK(r.code == 0);
  CHECK(r.out.find("⊢") != std::string::npos);
  CHECK(r.out.find("am = amount") != std::string::npos);
}

TEST_CASE("a compile of a non-contract program is a user error") {
  fs::path src = scratch_dir() / "plain.alb";
  write_file(src, "def f : {} -> {} = noop\n");
  CliResult r = run_cli({"compile", src.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("albertc: ") == 0);
}

TEST_CASE("fuzz prints a stable summary and exits cleanly") {
  CliResult r = run_cli({"fuzz", "--cases", "30", "--seed", "11"});
  CHECK(r.code == 0);
  CHECK(r.out.find("cases: 30\nruns: 90\ndisagreements: 0\n"
                   "generator type errors: 0\nmichelson type errors: 0\n"
                   "coverage:\n") == 0);
  CHECK(r.err.empty());
}

TEST_CASE("fuzz is byte-deterministic including its report file") {
  fs::path dir = scratch_dir();
  fs::path rep1 = dir / "r1.jsonl", rep2 = dir / "r2.jsonl";
  CliResult a = run_cli({"fuzz", "--cases", "20", "--seed", "5", "--report",
                         rep1.string()});
  CliResult b = run_cli({"fuzz", "--cases", "20", "--seed", "5", "--report",
                         rep2.string()});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(read_file(rep1.string()) == read_file(rep2.string()));
}

TEST_CASE("the report is one well-formed JSON object per case") {
  fs::path rep = scratch_dir() / "report.jsonl";
  CliResult r = run_cli({"fuzz", "--cases", "12", "--seed", "3", "--report",
                         rep.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(rep.string());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    REQUIRE_FALSE(line.empty());
    nlohmann::json row = nlohmann::json::parse(line);
    CHECK(row["seed"] == 3);
    CHECK(row["case"] == rows);
    CHECK(row["typechecked"] == true);
    CHECK(row["agree"] == true);
    CHECK(row["runs"].is_array());
    CHECK(row["runs"].size() == 3);
    ++rows;
  }
  CHECK(rows == 12);
}

TEST_CASE("the harness agrees with itself on the voting scenarios") {
  Program p = parse_fixture("voting.alb");
  TypedProgram tp = typecheck_program(p);
  const TypePtr in_ty = tp.find("guarded_vote")->input_type;
  struct Scenario {
    const char* ballot;
    std::int64_t amount;
  };
  for (const auto& s : {Scenario{"yes", 100}, Scenario{"yes", 99},
                        Scenario{"maybe", 100}}) {
    CAPTURE(s.ballot);
    ValuePtr input = retype_value(parse_value_text(voting_input(s.ballot)), in_ty);
    FuzzVerdict v = differential_check(p, input, s.amount);
    CHECK(v.agree);
    CHECK(v.program_typechecked);
    CHECK(v.michelson_typechecked);
    CHECK(v.shrink_trace.empty());
    CHECK(v.albert_result == v.michelson_result);
    CHECK_FALSE(v.albert_result.empty());
  }
}

TEST_CASE("verdicts are pure functions of their inputs") {
  Program p = parse_fixture("voting.alb");
  TypedProgram tp = typecheck_program(p);
  ValuePtr input = retype_value(parse_value_text(voting_input("yes")),
                                tp.find("guarded_vote")->input_type);
  FuzzVerdict a = differential_check(p, input, 100);
  FuzzVerdict b = differential_check(p, input, 100);
  CHECK(a.agree == b.agree);
  CHECK(a.albert_result == b.albert_result);
  CHECK(a.michelson_result == b.michelson_result);
  CHECK(a.source == b.source);
  CHECK(a.input_text == b.input_text);
  CHECK(a.shrink_trace == b.shrink_trace);
}

TEST_CASE("a malformed input becomes data, not a crash, and shrinks stably") {
  Program p = parse_fixture("voting.alb");
  FuzzVerdict a, b;
  REQUIRE_NOTHROW(a = differential_check(p, v_nat(1), 0));
  REQUIRE_NOTHROW(b = differential_check(p, v_nat(1), 0));
  CHECK_FALSE(a.agree);  // both sides report, but through different errors
  CHECK(a.albert_result == b.albert_result);
  CHECK(a.michelson_result == b.michelson_result);
  CHECK(a.shrink_trace == b.shrink_trace);
}

TEST_CASE("the harness API repeats itself exactly") {
  FuzzOptions opts;
  opts.seed = 9;
  opts.cases = 25;
  FuzzStats a = run_fuzz(opts);
  FuzzStats b = run_fuzz(opts);
  CHECK(a.cases == 25);
  CHECK(a.runs == 75);
  CHECK(a.disagreements == 0);
  CHECK(a.generator_type_errors == 0);
  CHECK(a.michelson_type_errors == 0);
  CHECK(a.runs == b.runs);
  CHECK(a.coverage == b.coverage);
  CHECK(a.failures.empty());
}

TEST_CASE("tiny budgets are floored so entries keep the calling convention") {
  FuzzOptions opts;
  opts.seed = 4;
  opts.cases = 3;
  opts.budget = 1;
  FuzzStats st = run_fuzz(opts);
  CHECK(st.cases == 3);
  CHECK(st.runs == 9);
  CHECK(st.disagreements == 0);
}
