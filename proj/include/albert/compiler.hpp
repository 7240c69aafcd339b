// Translation to Michelson: right-comb encodings for records and variants,
// a name-keyed stack layout, instruction-by-instruction emission, and the
// contract calling convention. The scheme is deliberately naive — operands
// are brought to the top with DIG, results put back with DUG, and the layout
// is kept sorted by variable name between instructions, so the code for any
// instruction is a pure function of its typed form.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "albert/michelson.hpp"
#include "albert/typer.hpp"

namespace albert {

// Right-comb encoding: record {l1..ln} (sorted) → pair c(t1) (pair … c(tn));
// singleton collapses to its payload; the empty record is unit; variants use
// `or` the same way; bool and option map to their native types.
MTypePtr compile_type(const TypePtr& t);

// Mutually inverse on well-typed data.
MValPtr compile_value(const ValuePtr& v, const TypePtr& t);
ValuePtr decode_value(const MValPtr& m, const TypePtr& t);

class Compiler {
 public:
  explicit Compiler(const TypedProgram& prog) : prog_(prog) {}

  // The whole pipeline back half; `main` must look like
  // {param : P; store : S} -> {operations : list operation; store : S}.
  MichScript compile_contract(const Label& main);

  // The splice emitted at a call site: consumes the input record on top of
  // the stack, leaves the output record (or fails). Position-independent —
  // every DIG/DUG stays within the slots the code itself created.
  const MichCode& function_code(const Label& name);

  // One instruction against an explicit layout (index 0 = stack top; the
  // layout must list exactly env_in's variables). Returns the code and the
  // layout after — sorted again, matching env_out.
  std::pair<MichCode, std::vector<Label>> compile_instruction(
      std::vector<Label> layout, const TInstrPtr& instr);

 private:
  const TypedProgram& prog_;
  std::map<Label, MichCode> fn_cache_;
};

MichScript compile_contract(const TypedProgram& p, const Label& main);

}  // namespace albert
