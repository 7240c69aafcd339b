// Differential validation: run a program through the reference interpreter
// and through compile → Michelson interpreter → decode, then compare the
// results — including failure payloads. Disagreements shrink greedily by
// instruction deletion (keeping only deletions that preserve typeability and
// the disagreement).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "albert/ast.hpp"

namespace albert {

struct FuzzVerdict {
  std::string source;            // printed program
  std::string input_text;        // printed entry input record
  std::int64_t amount = 0;
  std::string albert_result;     // "value: …" or "failure: …"
  std::string michelson_result;  // same, or "type error: …" / "compile error: …"
  bool program_typechecked = true;
  bool michelson_typechecked = true;
  bool agree = false;
  std::vector<std::string> shrink_trace;  // progressively smaller failing sources
};

// One (program, input, amount) triple; the entry point is the last function.
// Never throws: every breakage becomes data in the verdict.
FuzzVerdict differential_check(const Program& p, const ValuePtr& input, std::int64_t amount);

struct FuzzOptions {
  std::uint64_t seed = 0;
  std::size_t cases = 1000;
  std::size_t budget = 40;
  std::size_t inputs_per_program = 3;
  std::ostream* report = nullptr;  // JSON lines, one object per case, when set
};

struct FuzzStats {
  std::size_t cases = 0;
  std::size_t runs = 0;                   // program × input executions
  std::size_t disagreements = 0;          // runs that did not agree
  std::size_t generator_type_errors = 0;  // generated program failed to typecheck
  std::size_t michelson_type_errors = 0;  // compiled script failed its typecheck (per program)
  std::map<std::string, std::size_t> coverage;  // construct tallies across programs
  std::vector<FuzzVerdict> failures;            // first few disagreements, shrunk
};

// Deterministic per options; every failure is reproducible from (seed, case).
FuzzStats run_fuzz(const FuzzOptions& opts);

}  // namespace albert
