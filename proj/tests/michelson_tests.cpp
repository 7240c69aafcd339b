// The Michelson subset: stack typechecking, interpretation, the printer's
// concrete syntax, the stack-shuffling identities, and interpreter/typechecker
// agreement over thousands of compiled programs.
#include <limits>
#include <string>
#include <vector>

#include "albert/compiler.hpp"
#include "albert/generator.hpp"
#include "albert/michelson.hpp"
#include "albert/typer.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace albert;
using namespace albert::test;

TEST_CASE("DUP duplicates the top of the stack type") {
  MichStackTy out = mtc_typecheck({m_op(MOp::DUP)}, stack_of({mt_nat()}));
  REQUIRE(out.items.size() == 2);
  CHECK(mich_type_equal(out.items[0], mt_nat()));
  CHECK(mich_type_equal(out.items[1], mt_nat()));
}

TEST_CASE("stack underflow is a type error naming the instruction") {
  try {
    mtc_typecheck({m_op(MOp::SWAP)}, stack_of({mt_nat()}));
    FAIL("expected rejection");
  } catch (const MichTypeError& e) {
    CHECK(std::string(e.what()).find("SWAP") != std::string::npos);
  }
}

TEST_CASE("COMPARE then GE turns two mutez into a bool") {
  MichStackTy out = mtc_typecheck({m_op(MOp::COMPARE), m_op(MOp::GE)},
                                  stack_of({mt_mutez(), mt_mutez()}));
  REQUIRE(out.items.size() == 1);
  CHECK(mich_type_equal(out.items[0], mt_bool()));
}

TEST_CASE("a failing arm unifies with its sibling at the branch join") {
  // IF with a FAILWITH arm: the surviving arm decides the output type.
  MichCode code = {m_if({m_push(mt_string(), mv_string("x")), m_op(MOp::FAILWITH)},
                        {})};
  MichStackTy out = mtc_typecheck(code, stack_of({mt_bool(), mt_nat()}));
  REQUIRE(out.items.size() == 1);
  CHECK(mich_type_equal(out.items[0], mt_nat()));

  // Both arms failing makes the whole branch polymorphic.
  MichCode both = {m_if({m_push(mt_string(), mv_string("x")), m_op(MOp::FAILWITH)},
                        {m_push(mt_string(), mv_string("y")), m_op(MOp::FAILWITH)})};
  CHECK(mtc_typecheck(both, stack_of({mt_bool()})).failed);

  // Code after an unconditional failure is dead and rejected.
  CHECK_THROWS_AS(
      mtc_typecheck({m_push(mt_string(), mv_string("x")), m_op(MOp::FAILWITH),
                     m_op(MOp::UNIT)},
                    stack_of({})),
      MichTypeError);
}

TEST_CASE("arms must otherwise end in the same stack type") {
  MichCode bad = {m_if({m_op(MOp::UNIT)}, {m_push(mt_nat(), mv_nat(1))})};
  CHECK_THROWS_AS(mtc_typecheck(bad, stack_of({mt_bool()})), MichTypeError);
}

TEST_CASE("PUSH then ADD computes on the stack") {
  MichResult r = mtc_interpret({m_push(mt_nat(), mv_nat(1)), m_op(MOp::ADD)},
                               {mv_nat(0)});
  REQUIRE_FALSE(r.failed());
  REQUIRE(r.stack.size() == 1);
  CHECK(mich_value_equal(r.stack[0], mv_nat(1)));
}

TEST_CASE("addition is typed per operand kind; mixing kinds is rejected") {
  for (auto t : {mt_nat(), mt_int(), mt_mutez()}) {
    MichStackTy out = mtc_typecheck({m_op(MOp::ADD)}, stack_of({t, t}));
    CHECK(mich_type_equal(out.items[0], t));
  }
  CHECK_THROWS_AS(mtc_typecheck({m_op(MOp::ADD)}, stack_of({mt_int(), mt_nat()})),
                  MichTypeError);
  CHECK_THROWS_AS(
      mtc_typecheck({m_op(MOp::ADD)}, stack_of({mt_string(), mt_string()})),
      MichTypeError);
}

TEST_CASE("mutez addition overflows to a runtime failure") {
  MichResult r = mtc_interpret(
      {m_op(MOp::ADD)},
      {mv_mutez(std::numeric_limits<std::int64_t>::max()), mv_mutez(1)});
  REQUIRE(r.failed());
  CHECK(mich_value_equal(r.failure, mv_string("mutez overflow")));
}

TEST_CASE("GET hits present keys and misses absent ones") {
  MValPtr map = mv_map({{mv_string("yes"), mv_nat(0)}});
  MichResult miss = mtc_interpret({m_op(MOp::GET)}, {mv_string("maybe"), map});
  REQUIRE_FALSE(miss.failed());
  CHECK(mich_value_equal(miss.stack[0], mv_none()));

  MichResult hit = mtc_interpret({m_op(MOp::GET)}, {mv_string("yes"), map});
  REQUIRE_FALSE(hit.failed());
  CHECK(mich_value_equal(hit.stack[0], mv_some(mv_nat(0))));
}

TEST_CASE("FAILWITH carries its payload out") {
  MichResult r =
      mtc_interpret({m_op(MOp::FAILWITH)}, {mv_string("you are so cheap!")});
  REQUIRE(r.failed());
  CHECK(mich_value_equal(r.failure, mv_string("you are so cheap!")));
}

namespace {

// A stack of distinct values/types, deep enough for the shuffle identities.
std::vector<MValPtr> mixed_values(std::size_t depth) {
  const std::vector<MValPtr> pool = {mv_nat(1),      mv_string("s"),
                                     mv_bool(true),  mv_mutez(5),
                                     mv_int(-2),     mv_unit()};
  return {pool.begin(), pool.begin() + depth};
}

std::vector<MTypePtr> mixed_types(std::size_t depth) {
  const std::vector<MTypePtr> pool = {mt_nat(),   mt_string(), mt_bool(),
                                      mt_mutez(), mt_int(),    mt_unit()};
  return {pool.begin(), pool.begin() + depth};
}

}  // namespace

TEST_CASE("DIG n then DUG n is the identity on deep-enough stacks") {
  for (std::size_t depth = 1; depth <= 6; ++depth) {
    for (std::size_t n = 0; n < depth; ++n) {
      CAPTURE(depth);
      CAPTURE(n);
      MichCode code = {m_dig(n), m_dug(n)};
      MichStackTy ty = mtc_typecheck(code, stack_of(mixed_types(depth)));
      REQUIRE(ty.items.size() == depth);
      for (std::size_t i = 0; i < depth; ++i)
        CHECK(mich_type_equal(ty.items[i], mixed_types(depth)[i]));

      MichResult r = mtc_interpret(code, mixed_values(depth));
      REQUIRE_FALSE(r.failed());
      REQUIRE(r.stack.size() == depth);
      for (std::size_t i = 0; i < depth; ++i)
        CHECK(mich_value_equal(r.stack[i], mixed_values(depth)[i]));
    }
    // Reaching past the bottom is a type error.
    CHECK_THROWS_AS(mtc_typecheck({m_dig(depth)}, stack_of(mixed_types(depth))),
                    MichTypeError);
  }
}

TEST_CASE("PAIR then UNPAIR is the identity on stacks of any depth") {
  for (std::size_t depth = 2; depth <= 6; ++depth) {
    CAPTURE(depth);
    for (MichCode code :
         {MichCode{m_op(MOp::PAIR), m_op(MOp::UNPAIR)},
          MichCode{m_op(MOp::UNPAIR), m_op(MOp::PAIR)}}) {
      std::vector<MValPtr> stack = mixed_values(depth);
      std::vector<MTypePtr> tys = mixed_types(depth);
      if (code[0].op == MOp::UNPAIR) {
        // Pre-pair the top two so UNPAIR has something to split.
        stack[1] = mv_pair(stack[0], stack[1]);
        stack.erase(stack.begin());
        tys[1] = mt_pair(tys[0], tys[1]);
        tys.erase(tys.begin());
      }
      MichStackTy ty = mtc_typecheck(code, stack_of(tys));
      REQUIRE(ty.items.size() == tys.size());
      for (std::size_t i = 0; i < tys.size(); ++i)
        CHECK(mich_type_equal(ty.items[i], tys[i]));
      MichResult r = mtc_interpret(code, stack);
      REQUIRE_FALSE(r.failed());
      REQUIRE(r.stack.size() == stack.size());
      for (std::size_t i = 0; i < stack.size(); ++i)
        CHECK(mich_value_equal(r.stack[i], stack[i]));
    }
  }
}

TEST_CASE("LEFT wraps and IF_LEFT selects the matching arm") {
  MichCode wrap_left = {m_left(mt_string()),
                        m_if_left({m_push(mt_nat(), mv_nat(1)), m_op(MOp::ADD)},
                                  {m_op(MOp::DROP), m_push(mt_nat(), mv_nat(99))})};
  MichResult l = mtc_interpret(wrap_left, {mv_nat(4)});
  REQUIRE_FALSE(l.failed());
  CHECK(mich_value_equal(l.stack[0], mv_nat(5)));

  MichCode wrap_right = {m_right(mt_nat()),
                         m_if_left({m_push(mt_nat(), mv_nat(1)), m_op(MOp::ADD)},
                                   {m_op(MOp::DROP), m_push(mt_nat(), mv_nat(99))})};
  MichResult r = mtc_interpret(wrap_right, {mv_string("x")});
  REQUIRE_FALSE(r.failed());
  CHECK(mich_value_equal(r.stack[0], mv_nat(99)));
}

TEST_CASE("COMPARE orders top against second and is antisymmetric") {
  // Frozen orientation: with 1 on top of 2, the comparison is 1 vs 2.
  MichResult r = mtc_interpret({m_op(MOp::COMPARE)}, {mv_nat(1), mv_nat(2)});
  CHECK(mich_value_equal(r.stack[0], mv_int(-1)));

  const std::vector<std::vector<MValPtr>> pools = {
      {mv_nat(0), mv_nat(1), mv_nat(5)},
      {mv_int(-2), mv_int(0), mv_int(3)},
      {mv_string(""), mv_string("a"), mv_string("ab"), mv_string("b")},
      {mv_mutez(0), mv_mutez(1),
       mv_mutez(std::numeric_limits<std::int64_t>::max())},
      {mv_bool(false), mv_bool(true)},
  };
  for (const auto& pool : pools)
    for (const auto& a : pool)
      for (const auto& b : pool) {
        CAPTURE(print_mich_value(a));
        CAPTURE(print_mich_value(b));
        CHECK(mich_compare(a, b) == -mich_compare(b, a));
        if (mich_compare(a, b) == 0) CHECK(mich_value_equal(a, b));
      }

  // Spot-check the published string order.
  CHECK(mich_compare(mv_string("a"), mv_string("ab")) < 0);
  CHECK(mich_compare(mv_string("ab"), mv_string("b")) < 0);
  CHECK(mich_compare(mv_bool(false), mv_bool(true)) < 0);
}

TEST_CASE("the identity contract returns its storage unchanged") {
  MichScript s{mt_string(), mt_nat(),
               {m_op(MOp::CDR), m_nil(mt_operation()), m_op(MOp::PAIR)}};
  CHECK_NOTHROW(mtc_typecheck_script(s));
  MichContractResult r = run_contract(s, mv_string("x"), mv_nat(7), 0);
  REQUIRE_FALSE(r.failed());
  CHECK(mich_value_equal(r.output,
                         mv_pair(mv_list({}), mv_nat(7))));
}

TEST_CASE("the convention rejects code with the wrong output shape") {
  MichScript s{mt_string(), mt_nat(), {}};  // leaves pair string nat
  CHECK_THROWS_AS(mtc_typecheck_script(s), MichTypeError);
}

TEST_CASE("AMOUNT reads the execution context") {
  MichContext ctx;
  ctx.amount = 31;
  MichResult r = mtc_interpret({m_op(MOp::AMOUNT)}, {}, ctx);
  REQUIRE_FALSE(r.failed());
  CHECK(mich_value_equal(r.stack[0], mv_mutez(31)));
}

TEST_CASE("the printer emits canonical concrete syntax") {
  CHECK(print_mich_code({m_op(MOp::CDR), m_nil(mt_operation()), m_op(MOp::PAIR)}) ==
        "{ CDR ; NIL operation ; PAIR }");
  CHECK(print_mich_code({}) == "{}");
  CHECK(print_mich_code({m_push(
            mt_map(mt_string(), mt_nat()),
            mv_map({{mv_string("no"), mv_nat(0)}, {mv_string("yes"), mv_nat(0)}}))}) ==
        "{ PUSH (map string nat) { Elt \"no\" 0 ; Elt \"yes\" 0 } }");

  MichScript ident{mt_string(), mt_nat(),
                   {m_op(MOp::CDR), m_nil(mt_operation()), m_op(MOp::PAIR)}};
  CHECK(print_michelson(ident) ==
        "parameter string;\nstorage nat;\ncode { CDR ; NIL operation ; PAIR };\n");

  CHECK(print_mich_type(mt_pair(mt_mutez(), mt_map(mt_string(), mt_nat()))) ==
        "pair mutez (map string nat)");
  CHECK(print_mich_value(mv_pair(mv_mutez(100), mv_left(mv_nat(1)))) ==
        "(Pair 100 (Left 1))");
  CHECK(print_mich_value(mv_int(-3)) == "-3");
  CHECK(print_mich_value(mv_string("a\"b")) == "\"a\\\"b\"");
}

TEST_CASE("the step ceiling stops runaway execution loudly") {
  MichContext ctx;
  ctx.max_steps = 1;
  CHECK_THROWS_AS(mtc_interpret({m_op(MOp::UNIT), m_op(MOp::DROP)}, {}, ctx),
                  InternalError);
}

namespace {

TypePtr field_type(const TypePtr& record, const Label& label) {
  for (const auto& [name, t] : std::get<RecordTy>(record->node).fields)
    if (name == label) return t;
  return nullptr;
}

}  // namespace

TEST_CASE("interpreting well-typed code always lands in the typed stack") {
  // Compiled generated programs supply a large family of nontrivial
  // well-typed instruction sequences; every run must end either in a failure
  // or in a value inhabiting the statically computed output stack.
  std::size_t runs = 0, failures = 0;
  for (std::uint64_t seed = 0; seed < 3500; ++seed) {
    Program p = generate_program(seed, GenConfig{30});
    TypedProgram tp = typecheck_program(p);
    const TypedFunction& entry = tp.functions.back();
    MichScript s = compile_contract(tp, entry.name);

    MichStackTy in = stack_of({mt_pair(s.param, s.storage)});
    MichStackTy out = mtc_typecheck(s.code, in);
    if (!out.failed) {
      REQUIRE(out.items.size() == 1);
      CHECK(mich_type_equal(
          out.items[0], mt_pair(mt_list(mt_operation()), s.storage)));
    }

    for (std::uint64_t j = 0; j < 3; ++j) {
      ValuePtr input =
          generate_input(mix_seed(seed, 1000 + j), entry.input_type);
      const auto& rec = std::get<RecordVal>(input->node);
      MValPtr pv = compile_value(rec.fields[0].second,
                                 field_type(entry.input_type, "param"));
      MValPtr sv = compile_value(rec.fields[1].second,
                                 field_type(entry.input_type, "store"));
      MichContext ctx;
      ctx.amount = static_cast<std::int64_t>(mix_seed(seed, 2000 + j) % 2001);
      MichResult r = mtc_interpret(s.code, {mv_pair(pv, sv)}, ctx);
      ++runs;
      if (r.failed()) {
        ++failures;
        continue;
      }
      REQUIRE(r.stack.size() == 1);
      CHECK(mich_value_has_type(r.stack[0],
                                mt_pair(mt_list(mt_operation()), s.storage)));
    }
  }
  CHECK(runs >= 10000);
  CHECK(failures < runs);  // the corpus exercises both outcomes
}
