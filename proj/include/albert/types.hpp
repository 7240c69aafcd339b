// Type algebra: alias inlining, lexicographic normalization, well-formedness,
// and the join operator on typing environments (disjoint record union).
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "albert/ast.hpp"

namespace albert {

enum class TypeErrorKind {
  UnboundVariable,
  VariableAlreadyBound,
  LinearityLeftover,
  TypeMismatch,
  UnknownConstructor,
  NonExhaustiveMatch,
  DuplicateBranch,
  UnknownFunction,
  JoinClash,
};

const char* type_error_kind_name(TypeErrorKind k);

struct TypeError : std::runtime_error {
  TypeErrorKind kind;
  Pos pos;
  TypeError(TypeErrorKind kind, Pos pos, const std::string& detail);
};

// A typing environment: variable name -> type, labels sorted and distinct.
// Environments are exactly record types, so one converts freely both ways.
class Env {
 public:
  Env() = default;
  static Env from_record(const TypePtr& record_type);  // internal error on non-record

  const TypeFields& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  bool contains(const Label& name) const;
  // Null when absent.
  TypePtr lookup(const Label& name) const;

  // Adds a binding; TypeError(VariableAlreadyBound) at `pos` if the name is live.
  void bind(const Label& name, TypePtr type, Pos pos = {});
  // Removes a binding; TypeError(UnboundVariable) at `pos` if absent.
  TypePtr take(const Label& name, Pos pos = {});
  void remove_all(const Env& consumed);  // internal error if any binding is absent

  TypePtr to_record() const;
  bool operator==(const Env& other) const;
  bool operator!=(const Env& other) const { return !(*this == other); }

 private:
  TypeFields items_;  // sorted by label
};

// Disjoint union of environments; TypeError(JoinClash) naming the first
// clashing label when the domains intersect.
Env join(const Env& a, const Env& b);

// Replaces every Alias node (in signatures, construct annotations and literal
// element types) by its definition; the result carries no aliases at all.
// TypeError on unknown names and on cyclic alias chains.
Program inline_aliases(const Program& p);

// Sorts record fields and variant constructors at every depth. Idempotent.
TypePtr normalize_type(const TypePtr& t);
// normalize_type applied to every type in the program, including types stored
// inside value literals.
Program normalize_program(const Program& p);
ValuePtr normalize_value(const ValuePtr& v);

// Checks label ordering/distinctness at every depth, variant non-emptiness and
// that map keys are comparable leaves. Expects t alias-free.
void well_formed(const TypePtr& t);  // throws TypeError

// True when `operation` occurs anywhere inside t.
bool contains_operation(const TypePtr& t);

// Structural equality of alias-free, normalized types.
bool type_equal(const TypePtr& a, const TypePtr& b);

}  // namespace albert
