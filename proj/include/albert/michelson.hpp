// Self-contained Michelson subset: types, values, instructions, a stack
// typechecker, a stack-machine interpreter and a concrete-syntax printer.
// This is both the compilation target and the independent backend the
// reference interpreter is differentially tested against.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "albert/ast.hpp"  // big_int, internal_error

namespace albert {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct MichType;
using MTypePtr = std::shared_ptr<const MichType>;

enum class MT {
  Unit, Nat, Int, String, Mutez, Bool, Operation,  // leaves
  Pair, Or, Option, List, Map,                     // constructors
};

struct MichType {
  MT k;
  MTypePtr a;  // pair/or/map: left component; option/list: element
  MTypePtr b;  // pair/or/map: right component
};

MTypePtr mt_unit();
MTypePtr mt_nat();
MTypePtr mt_int();
MTypePtr mt_string();
MTypePtr mt_mutez();
MTypePtr mt_bool();
MTypePtr mt_operation();
MTypePtr mt_pair(MTypePtr a, MTypePtr b);
MTypePtr mt_or(MTypePtr a, MTypePtr b);
MTypePtr mt_option(MTypePtr a);
MTypePtr mt_list(MTypePtr a);
MTypePtr mt_map(MTypePtr key, MTypePtr val);

bool mich_type_equal(const MTypePtr& a, const MTypePtr& b);
bool mich_comparable(const MTypePtr& t);  // leaf nat/int/string/mutez/bool
bool mich_pushable(const MTypePtr& t);    // contains no operation

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct MichValue;
using MValPtr = std::shared_ptr<const MichValue>;

enum class MV { Unit, Nat, Int, Mutez, String, Bool, Pair, Left, Right, Some,
                None, List, Map, Operation };

struct MichValue {
  MV k = MV::Unit;
  big_int num = 0;          // Nat/Int
  std::int64_t mutez = 0;   // Mutez (>= 0)
  std::string str = {};     // String; Operation: opaque tag
  bool flag = false;        // Bool
  MValPtr a = {};           // Pair: first; Left/Right/Some: payload
  MValPtr b = {};           // Pair: second
  std::vector<MValPtr> elems = {};                        // List
  std::vector<std::pair<MValPtr, MValPtr>> entries = {};  // Map, sorted by key
};

MValPtr mv_unit();
MValPtr mv_nat(big_int v);
MValPtr mv_int(big_int v);
MValPtr mv_mutez(std::int64_t v);
MValPtr mv_string(std::string v);
MValPtr mv_bool(bool v);
MValPtr mv_pair(MValPtr a, MValPtr b);
MValPtr mv_left(MValPtr v);
MValPtr mv_right(MValPtr v);
MValPtr mv_some(MValPtr v);
MValPtr mv_none();
MValPtr mv_list(std::vector<MValPtr> elems);
MValPtr mv_map(std::vector<std::pair<MValPtr, MValPtr>> entries);  // sorts
MValPtr mv_operation(std::string tag);

bool mich_value_equal(const MValPtr& a, const MValPtr& b);
int mich_compare(const MValPtr& a, const MValPtr& b);  // comparable leaves
bool mich_value_has_type(const MValPtr& v, const MTypePtr& t);

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

enum class MOp {
  PUSH, UNIT, PAIR, CAR, CDR, UNPAIR, DUP, DROP, SWAP, DIG, DUG,
  LEFT, RIGHT, IF_LEFT, IF, IF_NONE, SOME, NONE, NIL, CONS,
  ADD, COMPARE, GE, GET, UPDATE, AMOUNT, FAILWITH, SEQ,
};

struct MichInstr {
  MOp op;
  MTypePtr ty;   // PUSH/LEFT/RIGHT/NONE/NIL
  MValPtr val;   // PUSH
  std::size_t n = 0;          // DIG/DUG
  std::vector<MichInstr> a;   // IF*: first arm; SEQ: the sequence
  std::vector<MichInstr> b;   // IF*: second arm
};

using MichCode = std::vector<MichInstr>;

MichInstr m_op(MOp op);  // ops with no payload
MichInstr m_push(MTypePtr ty, MValPtr val);
MichInstr m_dig(std::size_t n);
MichInstr m_dug(std::size_t n);
MichInstr m_left(MTypePtr right_ty);
MichInstr m_right(MTypePtr left_ty);
MichInstr m_none(MTypePtr ty);
MichInstr m_nil(MTypePtr ty);
MichInstr m_if(MichCode then_arm, MichCode else_arm);
MichInstr m_if_left(MichCode left_arm, MichCode right_arm);
MichInstr m_if_none(MichCode none_arm, MichCode some_arm);
MichInstr m_seq(MichCode code);

bool mich_code_equal(const MichCode& a, const MichCode& b);

struct MichScript {
  MTypePtr param;
  MTypePtr storage;
  MichCode code;
};

// ---------------------------------------------------------------------------
// Stack typechecking
// ---------------------------------------------------------------------------

struct MichStackTy {
  bool failed = false;          // the post-FAILWITH stack; unifies with anything
  std::vector<MTypePtr> items;  // index 0 = top; empty when failed
};

MichStackTy stack_of(std::vector<MTypePtr> items);
MichStackTy failed_stack();
bool mich_stack_equal(const MichStackTy& a, const MichStackTy& b);

struct MichTypeError : std::runtime_error {
  explicit MichTypeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Returns the unique output stack type; instructions after a failure (outside
// a branch join) are rejected. Error messages carry an instruction path.
MichStackTy mtc_typecheck(const MichCode& code, const MichStackTy& input);

// Checks the contract calling convention: code must map
// [pair param storage] to [pair (list operation) storage] (or always fail).
void mtc_typecheck_script(const MichScript& s);

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

struct MichContext {
  std::int64_t amount = 0;
  std::uint64_t max_steps = 10'000'000;
};

struct MichResult {
  std::vector<MValPtr> stack;  // index 0 = top; meaningful iff !failed()
  MValPtr failure;             // FAILWITH payload
  bool failed() const { return failure != nullptr; }
};

// Precondition: code typechecks against the stack's type (underflow or a
// shape mismatch at runtime is an internal error, not a result).
MichResult mtc_interpret(const MichCode& code, std::vector<MValPtr> stack,
                         const MichContext& ctx = {});

struct MichContractResult {
  MValPtr output;   // pair (list operation) storage', set iff !failed()
  MValPtr failure;
  bool failed() const { return failure != nullptr; }
};

MichContractResult run_contract(const MichScript& s, const MValPtr& parameter,
                                const MValPtr& storage, std::int64_t amount);

// ---------------------------------------------------------------------------
// Concrete syntax
// ---------------------------------------------------------------------------

std::string print_mich_type(const MTypePtr& t);
std::string print_mich_value(const MValPtr& v);
std::string print_mich_code(const MichCode& code);  // "{ A ; B }"
std::string print_michelson(const MichScript& s);   // a full .tz script

}  // namespace albert
