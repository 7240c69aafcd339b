// Core syntax: types, values, and the instruction language.
//
// All AST nodes are immutable after construction and held through
// shared_ptr<const T>, so subtrees can be shared freely (including across
// threads) without copying. Equality is structural throughout.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace albert {

using big_int = boost::multiprecision::cpp_int;

// Variable names, record field labels and variant constructor names share one
// namespace: ASCII letters/digits/underscore, ordered bytewise.
using Label = std::string;

struct Pos {
  int line = 0;  // 1-based; 0 means "unknown"
  int col = 0;
};

// Thrown only when an internal invariant is violated (a bug in this toolchain,
// never a user error). The CLI maps it to its own exit code.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

[[noreturn]] void internal_error(const std::string& msg);

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct AlbertType;
using TypePtr = std::shared_ptr<const AlbertType>;
using TypeFields = std::vector<std::pair<Label, TypePtr>>;

enum class Prim { Nat, Int, String, Mutez, Bool, Operation };

struct RecordTy {
  TypeFields fields;  // labels pairwise distinct; sorted once normalized
};
struct VariantTy {
  TypeFields ctors;  // at least one constructor; labels distinct
};
struct PrimTy {
  Prim prim;
};
struct ListTy {
  TypePtr elem;
};
struct OptionTy {
  TypePtr elem;
};
struct MapTy {
  TypePtr key;  // comparable leaf type (checked by well_formed)
  TypePtr val;
};
struct AliasTy {
  Label name;
};

struct AlbertType {
  std::variant<PrimTy, RecordTy, VariantTy, ListTy, OptionTy, MapTy, AliasTy> node;
};

TypePtr t_prim(Prim p);
TypePtr t_nat();
TypePtr t_int();
TypePtr t_string();
TypePtr t_mutez();
TypePtr t_bool();
TypePtr t_operation();
TypePtr t_unit();  // the empty record {}
TypePtr t_record(TypeFields fields);
TypePtr t_variant(TypeFields ctors);
TypePtr t_list(TypePtr elem);
TypePtr t_option(TypePtr elem);
TypePtr t_map(TypePtr key, TypePtr val);
TypePtr t_alias(Label name);

bool equal_types(const TypePtr& a, const TypePtr& b);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct Value;
using ValuePtr = std::shared_ptr<const Value>;
using ValueFields = std::vector<std::pair<Label, ValuePtr>>;

struct NatVal {
  big_int v;  // >= 0
};
struct IntVal {
  big_int v;
};
struct MutezVal {
  std::int64_t v;  // >= 0; the < 2^63 bound is the int64_t range itself
};
struct StringVal {
  std::string v;
};
struct BoolVal {
  bool v;
};
struct RecordVal {
  ValueFields fields;  // sorted by label, distinct
};
struct VariantVal {
  Label ctor;
  ValuePtr payload;
  TypePtr type;  // the full variant type
};
struct SomeVal {
  ValuePtr payload;
};
struct NoneVal {
  TypePtr elem;  // null until a type ascription supplies it
};
struct ListVal {
  std::vector<ValuePtr> elems;
  TypePtr elem;  // null only for an unascribed empty literal
};
struct MapVal {
  std::vector<std::pair<ValuePtr, ValuePtr>> entries;  // sorted by key, distinct
  TypePtr key;  // null only for an unascribed empty literal
  TypePtr val;
};
struct OperationVal {
  std::string tag;  // opaque descriptor; no source literal exists for these
};

struct Value {
  std::variant<NatVal, IntVal, MutezVal, StringVal, BoolVal, RecordVal, VariantVal,
               SomeVal, NoneVal, ListVal, MapVal, OperationVal>
      node;
};

ValuePtr v_nat(big_int v);
ValuePtr v_int(big_int v);
ValuePtr v_mutez(std::int64_t v);
ValuePtr v_string(std::string v);
ValuePtr v_bool(bool v);
ValuePtr v_unit();  // {}
ValuePtr v_record(ValueFields fields);  // sorts fields; rejects duplicates
ValuePtr v_variant(Label ctor, ValuePtr payload, TypePtr type);
ValuePtr v_some(ValuePtr payload);
ValuePtr v_none(TypePtr elem);
ValuePtr v_list(std::vector<ValuePtr> elems, TypePtr elem);
ValuePtr v_map(std::vector<std::pair<ValuePtr, ValuePtr>> entries, TypePtr key,
               TypePtr val);  // sorts entries; rejects duplicate keys
ValuePtr v_operation(std::string tag);

bool equal_values(const ValuePtr& a, const ValuePtr& b);

// Total order on comparable leaf values (nat/int/string/mutez/bool); both sides
// must have the same shape. Returns <0, 0, >0. Anything else is an internal error.
int compare_values(const ValuePtr& a, const ValuePtr& b);

// The type a literal denotes on its own, or null when the literal is incomplete
// (an empty list/map or a bare None with no ascription).
TypePtr type_of_value(const ValuePtr& v);

// Structural inhabitation check; expects t alias-free and normalized.
bool value_has_type(const ValuePtr& v, const TypePtr& t);

// Re-reads a literal at the given (alias-free) type: bare numerals become
// int/mutez where required, `{}` becomes an empty map under a map type, empty
// lists and None receive their element types, and every mismatch is reported.
// Throws std::runtime_error with a human-readable message on mismatch.
ValuePtr retype_value(const ValuePtr& v, const TypePtr& t);

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

struct Arg;
using ArgPtr = std::shared_ptr<const Arg>;

struct VarArg {
  Label name;
};
struct ValArg {
  ValuePtr value;
};
struct RecordArg {
  std::vector<std::pair<Label, Label>> fields;  // field label = source variable
};

struct Arg {
  std::variant<VarArg, ValArg, RecordArg> node;
  Pos pos;
};

ArgPtr a_var(Label name, Pos pos = {});
ArgPtr a_val(ValuePtr v, Pos pos = {});
ArgPtr a_record(std::vector<std::pair<Label, Label>> fields, Pos pos = {});

struct VarLhs {
  Label name;
};
struct RecordLhs {
  std::vector<std::pair<Label, Label>> fields;  // field label -> bound variable
};

struct Lhs {
  std::variant<VarLhs, RecordLhs> node;
  Pos pos;
};

struct Rhs;
using RhsPtr = std::shared_ptr<const Rhs>;

// x, 5, {a = x; b = y}
struct ArgRhs {
  ArgPtr arg;
};
// f arg — builtin (dup/amount/failwith/assert_some) or user function call
struct ApplyRhs {
  Label fn;
  ArgPtr arg;
};
// x.l
struct ProjRhs {
  Label var;
  Label field;
};
// {x with l1 = v1; ...} — record update, sources are variables
struct UpdateRhs {
  Label var;
  std::vector<std::pair<Label, Label>> fields;
};
// update m k v — map update: k : key type, v : option (value type)
struct MapUpdateRhs {
  Label map;
  ArgPtr key;
  ArgPtr val;
};
enum class BinOpKind { Add, Ge, MapGet };
// x + y, x >= y, m[k] — operands are variables
struct BinOpRhs {
  BinOpKind op;
  Label left;
  Label right;
};
// (C arg : ty); annot is null only for `Some arg`
struct ConstructRhs {
  Label ctor;
  ArgPtr arg;
  TypePtr annot;
};
struct RhsBranch {
  Label ctor;
  Label binder;
  RhsPtr body;
  Pos pos;
};
// match x with | C1 b1 -> rhs1 | ... end, used as an expression
struct MatchRhs {
  Label scrutinee;
  std::vector<RhsBranch> branches;
};

struct Rhs {
  std::variant<ArgRhs, ApplyRhs, ProjRhs, UpdateRhs, MapUpdateRhs, BinOpRhs,
               ConstructRhs, MatchRhs>
      node;
  Pos pos;
};

RhsPtr r_arg(ArgPtr arg, Pos pos = {});
RhsPtr r_apply(Label fn, ArgPtr arg, Pos pos = {});
RhsPtr r_proj(Label var, Label field, Pos pos = {});
RhsPtr r_update(Label var, std::vector<std::pair<Label, Label>> fields, Pos pos = {});
RhsPtr r_mapupdate(Label map, ArgPtr key, ArgPtr val, Pos pos = {});
RhsPtr r_binop(BinOpKind op, Label left, Label right, Pos pos = {});
RhsPtr r_construct(Label ctor, ArgPtr arg, TypePtr annot, Pos pos = {});
RhsPtr r_match(Label scrutinee, std::vector<RhsBranch> branches, Pos pos = {});

struct Instruction;
using InstrPtr = std::shared_ptr<const Instruction>;

struct NoopInstr {};
struct SeqInstr {
  InstrPtr first;
  InstrPtr second;  // right-associated by the parser
};
struct AssignInstr {
  Lhs lhs;
  RhsPtr rhs;
};
struct DropInstr {
  Label var;
};
struct InstrBranch {
  Label ctor;
  Label binder;
  InstrPtr body;
  Pos pos;
};
struct MatchInstr {
  Label scrutinee;
  std::vector<InstrBranch> branches;
};
// An rhs in instruction position (`failwith "nope"`, `vote args`): the result
// record's fields are spread into the environment.
struct ExecInstr {
  RhsPtr rhs;
};

struct Instruction {
  std::variant<NoopInstr, SeqInstr, AssignInstr, DropInstr, MatchInstr, ExecInstr>
      node;
  Pos pos;
};

InstrPtr i_noop(Pos pos = {});
InstrPtr i_seq(InstrPtr first, InstrPtr second, Pos pos = {});
InstrPtr i_assign(Lhs lhs, RhsPtr rhs, Pos pos = {});
InstrPtr i_drop(Label var, Pos pos = {});
InstrPtr i_match(Label scrutinee, std::vector<InstrBranch> branches, Pos pos = {});
InstrPtr i_exec(RhsPtr rhs, Pos pos = {});

// ---------------------------------------------------------------------------
// Programs
// ---------------------------------------------------------------------------

struct TypeAlias {
  Label name;
  TypePtr type;
  Pos pos;
};

struct FuncDef {
  Label name;
  TypePtr input;   // record type (possibly an alias before inlining)
  TypePtr output;
  InstrPtr body;
  Pos pos;
};

struct Program {
  std::vector<TypeAlias> aliases;
  std::vector<FuncDef> functions;  // non-recursive; may reference earlier entries only
};

bool equal_args(const ArgPtr& a, const ArgPtr& b);
bool equal_lhs(const Lhs& a, const Lhs& b);
bool equal_rhs(const RhsPtr& a, const RhsPtr& b);
bool equal_instructions(const InstrPtr& a, const InstrPtr& b);
bool equal_programs(const Program& a, const Program& b);

}  // namespace albert
