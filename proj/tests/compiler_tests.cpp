// Translation to Michelson: comb encodings for types and values, the
// encode/decode inverse, per-instruction emission against a layout, the
// calling convention, and the checked-in golden script for the voting
// contract.
#include <functional>
#include <string>
#include <vector>

#include "albert/compiler.hpp"
#include "albert/eval.hpp"
#include "albert/generator.hpp"
#include "albert/michelson.hpp"
#include "albert/parser.hpp"
#include "albert/printer.hpp"
#include "albert/typer.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace albert;
using namespace albert::test;

namespace {

TypePtr storage_type() {
  return parse_type_text("{ threshold : mutez ; votes : map string nat }");
}

}  // namespace

TEST_CASE("records compile to right-nested pairs in sorted field order") {
  CHECK(mich_type_equal(compile_type(storage_type()),
                        mt_pair(mt_mutez(), mt_map(mt_string(), mt_nat()))));
  TypePtr three = parse_type_text("{ a : nat ; b : string ; c : bool }");
  CHECK(mich_type_equal(compile_type(three),
                        mt_pair(mt_nat(), mt_pair(mt_string(), mt_bool()))));
}

TEST_CASE("degenerate records collapse: empty to unit, singleton to its payload") {
  CHECK(mich_type_equal(compile_type(t_unit()), mt_unit()));
  CHECK(mich_type_equal(compile_type(parse_type_text("{ x : nat }")), mt_nat()));
  CHECK(mich_type_equal(compile_type(parse_type_text("[ A : string ]")),
                        mt_string()));
}

TEST_CASE("a three-constructor variant compiles to a right-nested or") {
  CHECK(mich_type_equal(
      compile_type(parse_type_text("[ A : nat | B : string | C : {} ]")),
      mt_or(mt_nat(), mt_or(mt_string(), mt_unit()))));
}

TEST_CASE("bool, option, list and map keep their native Michelson forms") {
  CHECK(mich_type_equal(compile_type(t_bool()), mt_bool()));
  CHECK(mich_type_equal(compile_type(t_option(t_nat())), mt_option(mt_nat())));
  CHECK(mich_type_equal(compile_type(t_list(t_operation())),
                        mt_list(mt_operation())));
  CHECK(mich_type_equal(
      compile_type(parse_type_text("map string { a : nat ; b : nat }")),
      mt_map(mt_string(), mt_pair(mt_nat(), mt_nat()))));
}

TEST_CASE("record values follow the pair comb") {
  ValuePtr store = v_record(
      {{"threshold", v_mutez(100)},
       {"votes", v_map({{v_string("yes"), v_nat(0)}}, t_string(), t_nat())}});
  MValPtr m = compile_value(store, storage_type());
  CHECK(mich_value_equal(
      m, mv_pair(mv_mutez(100), mv_map({{mv_string("yes"), mv_nat(0)}}))));
  CHECK(equal_values(decode_value(m, storage_type()), store));

  CHECK(mich_value_equal(compile_value(v_unit(), t_unit()), mv_unit()));
}

TEST_CASE("constructor positions follow the or comb for every arity up to four") {
  const char* names[] = {"a", "b", "c", "d"};
  for (int n = 1; n <= 4; ++n) {
    TypeFields ctors;
    for (int i = 0; i < n; ++i) ctors.emplace_back(names[i], t_nat());
    TypePtr vt = t_variant(ctors);
    for (int idx = 0; idx < n; ++idx) {
      CAPTURE(n);
      CAPTURE(idx);
      ValuePtr payload = v_nat(idx * 10 + 1);
      ValuePtr v = v_variant(names[idx], payload, vt);
      MValPtr expect = compile_value(payload, t_nat());
      if (n > 1) {
        // Wrap Left unless this is the last constructor, then prefix Rights.
        if (idx < n - 1) expect = mv_left(expect);
        for (int k = 0; k < idx; ++k) expect = mv_right(expect);
      }
      MValPtr m = compile_value(v, vt);
      CHECK(mich_value_equal(m, expect));
      CHECK(equal_values(decode_value(m, vt), v));
    }
  }

  // The middle constructor of a three-way variant sits one Right in.
  TypePtr three = parse_type_text("[ A : nat | B : nat | C : nat ]");
  CHECK(mich_value_equal(
      compile_value(v_variant("B", v_nat(5), three), three),
      mv_right(mv_left(mv_nat(5)))));
}

TEST_CASE("operation values survive the encoding opaquely") {
  TypePtr t = t_list(t_operation());
  ValuePtr v = v_list({v_operation("transfer#1")}, t_operation());
  MValPtr m = compile_value(v, t);
  CHECK(equal_values(decode_value(m, t), v));
}

TEST_CASE("encode and decode are mutually inverse on random typed values") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    Program p = generate_program(seed, GenConfig{25});
    TypedProgram tp = typecheck_program(p);
    const TypePtr input_ty = tp.functions.back().input_type;
    for (std::uint64_t j = 0; j < 3; ++j) {
      ValuePtr v = generate_input(mix_seed(seed, 17 + j), input_ty);
      MValPtr m = compile_value(v, input_ty);
      ValuePtr back = decode_value(m, input_ty);
      CHECK(equal_values(back, v));
      CHECK(mich_value_equal(compile_value(back, input_ty), m));
      ++checked;
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("drop compiles to a dig and a drop") {
  TypedProgram empty = typecheck_program(Program{});
  Compiler c(empty);
  Env env;
  env.bind("a", t_nat());
  env.bind("b", t_string());

  auto [deep, lay1] = c.compile_instruction({"a", "b"},
                                            typecheck_instruction(env, i_drop("b")));
  CHECK(mich_code_equal(deep, {m_dig(1), m_op(MOp::DROP)}));
  CHECK(lay1 == std::vector<Label>{"a"});

  auto [top, lay2] = c.compile_instruction({"a", "b"},
                                           typecheck_instruction(env, i_drop("a")));
  CHECK(mich_code_equal(top, {m_op(MOp::DROP)}));
  CHECK(lay2 == std::vector<Label>{"b"});
}

TEST_CASE("projection walks the comb: CAR chain position by position") {
  TypedProgram empty = typecheck_program(Program{});
  Compiler c(empty);
  Env env;
  env.bind("r", parse_type_text("{ a : nat ; b : string ; c : bool }"));

  auto code_for = [&](const char* field) {
    auto ti = typecheck_instruction(
        env, i_assign(Lhs{VarLhs{"y"}, {}}, r_proj("r", field)));
    return c.compile_instruction({"r"}, ti).first;
  };
  CHECK(mich_code_equal(code_for("a"), {m_op(MOp::CAR)}));
  CHECK(mich_code_equal(code_for("b"), {m_op(MOp::CDR), m_op(MOp::CAR)}));
  CHECK(mich_code_equal(code_for("c"), {m_op(MOp::CDR), m_op(MOp::CDR)}));
}

TEST_CASE("every emitted step leaves a sorted layout matching its environment") {
  TypedProgram tp = typecheck_fixture("voting.alb");
  Compiler c(tp);
  std::function<void(std::vector<Label>&, const TInstrPtr&)> walk =
      [&](std::vector<Label>& layout, const TInstrPtr& step) {
        if (step->k == TInstr::K::Seq) {
          walk(layout, step->first);
          walk(layout, step->second);
          return;
        }
        auto next = c.compile_instruction(layout, step).second;
        if (step->fails) return;  // no layout survives a guaranteed failure
        CHECK(std::is_sorted(next.begin(), next.end()));
        REQUIRE(next.size() == step->env_out.size());
        for (std::size_t i = 0; i < next.size(); ++i)
          CHECK(next[i] == step->env_out.items()[i].first);
        layout = next;
      };
  for (const auto& fn : tp.functions) {
    std::vector<Label> layout;
    for (const auto& [l, t] : fn.input.items()) layout.push_back(l);
    walk(layout, fn.body);
  }
}

TEST_CASE("the compiled voting script matches the checked-in golden file") {
  TypedProgram tp = typecheck_fixture("voting.alb");
  MichScript s = compile_contract(tp, "guarded_vote");
  CHECK(print_michelson(s) == read_file(golden_path("voting.tz")));
}

TEST_CASE("the voting script typechecks with the documented interface") {
  TypedProgram tp = typecheck_fixture("voting.alb");
  MichScript s = compile_contract(tp, "guarded_vote");
  CHECK_NOTHROW(mtc_typecheck_script(s));
  CHECK(mich_type_equal(s.param, mt_string()));
  CHECK(mich_type_equal(s.storage,
                        mt_pair(mt_mutez(), mt_map(mt_string(), mt_nat()))));
}

TEST_CASE("entries that break the calling convention are rejected") {
  TypedProgram plain =
      typecheck_program(parse_program("def f : {} -> {} = noop"));
  CHECK_THROWS_AS(compile_contract(plain, "f"), TypeError);

  TypedProgram wrong_out = typecheck_program(parse_program(
      "def f : { param : nat ; store : nat } -> { store : nat } = drop param"));
  CHECK_THROWS_AS(compile_contract(wrong_out, "f"), TypeError);

  CHECK_THROWS_AS(
      compile_contract(typecheck_fixture("voting.alb"), "missing_entry"),
      TypeError);
}

TEST_CASE("the storage-identity contract works end to end") {
  TypedProgram tp = typecheck_fixture("identity.alb");
  MichScript s = compile_contract(tp, "main");
  CHECK_NOTHROW(mtc_typecheck_script(s));
  CHECK(mich_type_equal(s.param, mt_unit()));
  CHECK(mich_type_equal(s.storage, mt_nat()));

  // The naive emission and the hand-written three-instruction form agree.
  MichScript hand{mt_unit(), mt_nat(),
                  {m_op(MOp::CDR), m_nil(mt_operation()), m_op(MOp::PAIR)}};
  for (std::int64_t n : {0, 7, 12345}) {
    MichContractResult a = run_contract(s, mv_unit(), mv_nat(n), 0);
    MichContractResult b = run_contract(hand, mv_unit(), mv_nat(n), 0);
    REQUIRE_FALSE(a.failed());
    REQUIRE_FALSE(b.failed());
    CHECK(mich_value_equal(a.output, b.output));
  }
}

TEST_CASE("calling a helper compiles to the same behavior as its inlined body") {
  const std::string with_call =
      "def add1 : { x : nat } -> { y : nat } = one = 1 ; y = x + one\n"
      "def main : { param : nat ; store : nat } -> { operations : list "
      "operation ; store : nat } =\n"
      "  { y = result } = add1 { x = param } ;\n"
      "  drop store ; store = result ;\n"
      "  operations = ([] : list operation)\n";
  const std::string inlined =
      "def main : { param : nat ; store : nat } -> { operations : list "
      "operation ; store : nat } =\n"
      "  one = 1 ; result = param + one ;\n"
      "  drop store ; store = result ;\n"
      "  operations = ([] : list operation)\n";
  TypedProgram a = typecheck_program(parse_program(with_call));
  TypedProgram b = typecheck_program(parse_program(inlined));
  MichScript sa = compile_contract(a, "main");
  MichScript sb = compile_contract(b, "main");
  CHECK_NOTHROW(mtc_typecheck_script(sa));
  CHECK_NOTHROW(mtc_typecheck_script(sb));
  for (std::int64_t n : {0, 5, 41}) {
    MichContractResult ra = run_contract(sa, mv_nat(n), mv_nat(0), 0);
    MichContractResult rb = run_contract(sb, mv_nat(n), mv_nat(0), 0);
    REQUIRE_FALSE(ra.failed());
    REQUIRE_FALSE(rb.failed());
    CHECK(mich_value_equal(ra.output, rb.output));
    CHECK(mich_value_equal(ra.output, mv_pair(mv_list({}), mv_nat(n + 1))));
  }
}

TEST_CASE("compiled matches agree with the reference on every constructor") {
  TypedProgram tp = typecheck_fixture("choice.alb");
  MichScript s = compile_contract(tp, "pick");
  CHECK_NOTHROW(mtc_typecheck_script(s));
  for (std::int64_t n : {0, 3, 9}) {
    ValuePtr in = retype_value(
        v_record({{"param", v_nat(n)}, {"store", v_int(n)}}),
        tp.find("pick")->input_type);
    EvalResult ref = eval_function(tp, "pick", in);
    MichContractResult run = run_contract(s, mv_nat(n), mv_int(n), 0);
    REQUIRE_FALSE(ref.failed());
    REQUIRE_FALSE(run.failed());
    CHECK(equal_values(decode_value(run.output, tp.find("pick")->output_type),
                       ref.value));
  }
}
