// Type-directed random program generation for the differential harness.
// Programs are well typed by construction: the generator tracks the linear
// environment exactly as the typechecker does and only emits instructions
// whose operands are available. Everything is deterministic per seed.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "albert/ast.hpp"

namespace albert {

struct GenConfig {
  std::size_t budget = 40;  // rough instruction budget across all functions
};

// Deterministic per (seed, config). The last function always follows the
// contract calling convention (except for the degenerate budget-1 program).
Program generate_program(std::uint64_t seed, const GenConfig& cfg = {});

// A random inhabitant of t. Strings come from a small shared pool so that
// map lookups hit, and numeric extremes (huge nats, near-overflow mutez)
// appear occasionally.
ValuePtr generate_value(std::mt19937_64& rng, const TypePtr& t);

// A random input record for an entry point of the given input type.
ValuePtr generate_input(std::uint64_t seed, const TypePtr& input_type);

// Which right-hand-side forms a program exercises, by name — used by the
// harness to keep the generator honest about coverage.
std::map<std::string, std::size_t> rhs_coverage(const Program& p);

}  // namespace albert
