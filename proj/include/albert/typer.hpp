// Linear typechecker. Produces a typed program in which every instruction
// carries its input and output environments and every right-hand side knows
// exactly which bindings it consumes and what type it produces.
//
// Checking is a single top-down pass: aliases are inlined, types normalized,
// then each function is checked in definition order (a function may call only
// functions defined above it, which also rules out recursion — calls are
// inlined by the compiler). Environments thread the frame implicitly: each
// form removes precisely the bindings it consumes and everything else passes
// through untouched.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "albert/ast.hpp"
#include "albert/types.hpp"

namespace albert {

// ---------------------------------------------------------------------------
// Typed IR
// ---------------------------------------------------------------------------

struct TArg {
  enum class K { Var, Lit, Record };
  K k = K::Lit;
  Pos pos;
  Label var;                                 // K::Var
  ValuePtr lit;                              // K::Lit — complete, fully typed
  std::vector<std::pair<Label, Label>> rec;  // K::Record — (field, source var), sorted
  TypePtr type;                              // type of the argument value
};

struct TRhs;
using TRhsPtr = std::shared_ptr<const TRhs>;

struct TRhsBranch {
  Label ctor;
  Label binder;
  TypePtr payload;  // binder's type
  TRhsPtr body;
};

// One struct for every right-hand-side form; `k` says which members are live.
struct TRhs {
  enum class K {
    Arg,        // arg
    Dup,        // arg → {car; cdr}
    Amount,     // arg ({}) → mutez
    Failwith,   // arg (string) → ⊥
    AssertSome, // arg ({opt : option a}) → {res : a}
    Call,       // callee, arg → callee's output record
    Proj,       // var.field
    RecUpdate,  // {var with upd_fields}
    MapUpdate,  // update var key val
    Add,        // left + right
    Ge,         // left >= right
    MapGet,     // left[right]
    Construct,  // ctor applied to arg at type `type`
    Match,      // match scrutinee with branches end
  };
  K k = K::Arg;
  Pos pos;
  TypePtr type;   // produced type; null iff fails
  bool fails = false;
  Env consumed;   // bindings this rhs removes from the ambient environment

  TArg arg;                                         // Arg/Dup/Amount/Failwith/AssertSome/Call/Construct
  Label callee;                                     // Call
  Label ctor;                                       // Construct
  Label var;                                        // Proj/RecUpdate record; MapUpdate map
  Label field;                                      // Proj
  std::vector<std::pair<Label, Label>> upd_fields;  // RecUpdate (field, source var)
  TArg key, val;                                    // MapUpdate
  Label left, right;                                // Add/Ge/MapGet
  Label scrutinee;                                  // Match
  TypePtr scrut_type;                               // Match
  std::vector<TRhsBranch> branches;                 // Match, sorted by ctor
};

struct TInstr;
using TInstrPtr = std::shared_ptr<const TInstr>;

struct TInstrBranch {
  Label ctor;
  Label binder;
  TypePtr payload;
  TInstrPtr body;
};

struct TInstr {
  enum class K { Noop, Seq, Assign, Drop, Match, Exec };
  K k = K::Noop;
  Pos pos;
  InstrPtr src;        // the source form, kept for diagnostics and dumps
  Env env_in;
  Env env_out;         // meaningful only when !fails
  bool fails = false;  // the instruction always ends in a contract failure

  TInstrPtr first, second;             // Seq
  Lhs lhs;                             // Assign
  TRhsPtr rhs;                         // Assign/Exec
  Label var;                           // Drop
  TypePtr var_type;                    // Drop
  Label scrutinee;                     // Match
  TypePtr scrut_type;                  // Match
  std::vector<TInstrBranch> branches;  // Match, sorted by ctor
};

struct TypedFunction {
  Label name;
  Pos pos;
  TypePtr input_type;   // record
  TypePtr output_type;  // record
  Env input;            // = Env::from_record(input_type)
  Env output;
  TInstrPtr body;
  bool fails = false;  // body never returns normally
};

struct TypedProgram {
  std::vector<TypedFunction> functions;
  const TypedFunction* find(const Label& name) const;  // null when absent
};

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

// The signatures visible at some point of the program: functions defined
// earlier, in definition order.
struct FnSig {
  Env input;
  Env output;
};
using FnTable = std::vector<std::pair<Label, FnSig>>;

// Full pipeline front half: inline aliases, normalize, check well-formedness
// of every signature, then check each function.  Throws TypeError.
TypedProgram typecheck_program(const Program& p);

// Building blocks, usable on their own (expect alias-free normalized input).
TInstrPtr typecheck_instruction(const Env& env, const InstrPtr& i,
                                const FnTable& fns = {});
TRhsPtr typecheck_rhs(const Env& env, const RhsPtr& r, const FnTable& fns = {});

// The constructor alphabet of a matchable type, sorted by constructor name:
// bool → False/True (payload {}), option a → None ({})/Some (a), variants →
// their declared constructors. Empty result: the type cannot be matched on.
std::vector<std::pair<Label, TypePtr>> variant_view(const TypePtr& t);

// One line per instruction, `env_in ⊢ instr ⊣ env_out`, functions in order.
std::string dump_typed(const TypedProgram& p);

}  // namespace albert
