// Parser and pretty-printer: grammar coverage, sugar, error positions,
// totality, and the parse/print round-trip on the contract corpus.
#include <string>
#include <vector>

#include "albert/generator.hpp"
#include "albert/parser.hpp"
#include "albert/printer.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace albert;
using namespace albert::test;

TEST_CASE("the voting contract parses into one alias and two functions") {
  Program p = parse_fixture("voting.alb");
  REQUIRE(p.aliases.size() == 1);
  CHECK(p.aliases[0].name == "storage_ty");
  REQUIRE(p.functions.size() == 2);
  CHECK(p.functions[0].name == "vote");
  CHECK(p.functions[1].name == "guarded_vote");

  // Signatures mention the alias by name until the type pass expands it.
  const auto& input = std::get<RecordTy>(p.functions[0].input->node);
  REQUIRE(input.fields.size() == 2);
  CHECK(input.fields[0].first == "param");
  CHECK(input.fields[1].first == "store");
  CHECK(std::holds_alternative<AliasTy>(input.fields[1].second->node));
}

TEST_CASE("the smallest program is an empty-record function with a noop body") {
  Program p = parse_program("def f : {} -> {} = noop");
  REQUIRE(p.functions.size() == 1);
  CHECK(p.functions[0].name == "f");
  CHECK(std::holds_alternative<NoopInstr>(p.functions[0].body->node));
  CHECK(equal_types(p.functions[0].input, t_unit()));
  CHECK(equal_types(p.functions[0].output, t_unit()));

  CHECK(print_program(p) == "def f : {} -> {} =\n  noop\n");
}

TEST_CASE("duplicate labels in a record literal are rejected at parse time") {
  CHECK_THROWS_AS(
      parse_program("def f : {} -> {} = x = {a = 1; a = 2} ; drop x"),
      ParseError);
  try {
    parse_program("def f : {} -> {} = x = {a = 1; a = 2} ; drop x");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("a") != std::string::npos);
    CHECK(e.line >= 1);
    CHECK(e.col >= 1);
  }
}

TEST_CASE("syntax errors carry a one-based position") {
  try {
    parse_program("def f : {} -> {}");  // missing '=' and body
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.col >= 1);
  }
}

TEST_CASE("the parser is total: every mangled input parses or reports") {
  const std::string src = read_file(fixture_path("voting.alb"));
  std::size_t parsed = 0, rejected = 0;
  // Every prefix, plus the full text with one byte clobbered at intervals.
  for (std::size_t n = 0; n < src.size(); n += 7) {
    try {
      parse_program(src.substr(0, n));
      ++parsed;
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  for (std::size_t n = 0; n < src.size(); n += 13) {
    std::string bad = src;
    bad[n] = static_cast<char>(0xFF);
    try {
      parse_program(bad);
      ++parsed;
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  CHECK(parsed + rejected > 0);
  CHECK(rejected > 0);  // at least the clobbered-byte inputs cannot all parse
}

TEST_CASE("the tuple pattern is sugar for a car/cdr record pattern") {
  Program sugar = parse_program(
      "def f : { x : nat } -> { a : nat ; b : nat } = (a, b) = dup x");
  Program plain = parse_program(
      "def f : { x : nat } -> { a : nat ; b : nat } = {car = a; cdr = b} = dup x");
  CHECK(equal_programs(sugar, plain));
}

TEST_CASE("comments and string escapes lex correctly") {
  Program p = parse_program(
      "# leading comment\n"
      "def f : {} -> { s : string } =  # trailing comment\n"
      "  s = \"he said \\\"hi\\\" \\\\ done\"  # another\n");
  const auto& assign = std::get<AssignInstr>(p.functions[0].body->node);
  const auto& arg = std::get<ArgRhs>(assign.rhs->node);
  const auto& lit = std::get<ValArg>(arg.arg->node);
  CHECK(std::get<StringVal>(lit.value->node).v == "he said \"hi\" \\ done");
}

TEST_CASE("sequencing is right-associated") {
  Program p = parse_program(
      "def f : {} -> { a : nat ; b : nat ; c : nat } = a = 1 ; b = 2 ; c = 3");
  const auto& top = std::get<SeqInstr>(p.functions[0].body->node);
  CHECK(std::holds_alternative<AssignInstr>(top.first->node));
  const auto& rest = std::get<SeqInstr>(top.second->node);
  CHECK(std::holds_alternative<AssignInstr>(rest.first->node));
  CHECK(std::holds_alternative<AssignInstr>(rest.second->node));
}

TEST_CASE("value literals round-trip through the printer") {
  const std::vector<std::string> lits = {
      "42",
      "(-7 : int)",
      "(0 : int)",
      "\"hi\"",
      "True",
      "False",
      "(100 : mutez)",
      "{}",
      "{a = 1; b = \"x\"}",
      "([] : list nat)",
      "([1; 2; 3] : list nat)",
      "(None : option nat)",
      "Some 3",
      "({\"k\" -> 1} : map string nat)",
      "({} : map string nat)",
      "(A 5 : [ A : nat | B : string ])",
  };
  for (const auto& s : lits) {
    CAPTURE(s);
    ValuePtr v = parse_value_text(s);
    std::string printed = print_value(v);
    ValuePtr v2 = parse_value_text(printed);
    CHECK(equal_values(v, v2));
    CHECK(print_value(v2) == printed);  // printing is a fixpoint
  }
}

TEST_CASE("type literals parse and print consistently") {
  const std::vector<std::string> types = {
      "nat",
      "int",
      "string",
      "mutez",
      "bool",
      "operation",
      "{}",
      "{ a : nat ; b : string }",
      "[ A : nat | B : string | C : {} ]",
      "list nat",
      "map string nat",
      "option (list nat)",
      "{ x : { y : option nat } }",
  };
  for (const auto& s : types) {
    CAPTURE(s);
    TypePtr t = parse_type_text(s);
    TypePtr t2 = parse_type_text(print_type(t));
    CHECK(equal_types(t, t2));
  }
}

TEST_CASE("every corpus contract round-trips through print and parse") {
  for (const auto* name : {"voting.alb", "identity.alb", "choice.alb"}) {
    CAPTURE(name);
    Program p = parse_fixture(name);
    std::string printed = print_program(p);
    Program p2 = parse_program(printed);
    CHECK(equal_programs(p, p2));
    CHECK(print_program(p2) == printed);
  }
}

TEST_CASE("generated programs round-trip through print and parse") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CAPTURE(seed);
    Program p = generate_program(seed, GenConfig{35});
    std::string printed = print_program(p);
    Program p2;
    REQUIRE_NOTHROW(p2 = parse_program(printed));
    CHECK(equal_programs(p, p2));
    CHECK(print_program(p2) == printed);
  }
}

TEST_CASE("match branches accept an optional leading bar") {
  Program with_bar = parse_program(
      "def f : { b : bool } -> {} = match b with | True t -> drop t | False g "
      "-> drop g end");
  Program without = parse_program(
      "def f : { b : bool } -> {} = match b with True t -> drop t | False g "
      "-> drop g end");
  CHECK(equal_programs(with_bar, without));
}
