// Big-step reference interpreter over typed programs. Deterministic, pure
// (the chain context is an explicit argument), and the ground truth the
// compiled Michelson is differentially tested against.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "albert/typer.hpp"

namespace albert {

struct EvalContext {
  std::int64_t amount = 0;  // mutez sent with the call (AMOUNT)
  // Instruction-count ceiling; a guard against runaway inputs, not gas.
  std::uint64_t max_steps = 10'000'000;
  // When set, every instruction re-checks its runtime environment against the
  // statically annotated one — expensive, meant for the law tests.
  bool check_types = false;
};

// Raised on precondition violations (unknown function, ill-typed input value).
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exactly one of the two members is set.
struct EvalResult {
  ValuePtr value;    // the function's output record
  ValuePtr failure;  // the failure payload (failwith / assert_some / overflow)
  bool failed() const { return failure != nullptr; }
};

EvalResult eval_function(const TypedProgram& p, const Label& name,
                         const ValuePtr& input, const EvalContext& ctx = {});

}  // namespace albert
