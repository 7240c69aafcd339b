// Concrete-syntax printers. parse_program(print_program(p)) == p structurally
// for every well-formed program, and the value/type printers emit literals the
// parser reads back unchanged.
#pragma once

#include <string>

#include "albert/ast.hpp"

namespace albert {

std::string print_type(const TypePtr& t);

// Emits a self-contained literal: containers and non-nat numerics that need a
// type to re-parse get a minimal `(... : type)` ascription.
std::string print_value(const ValuePtr& v);

std::string print_rhs(const RhsPtr& r);

// One instruction on one line; match bodies are flattened inline. Meant for
// diagnostics and env dumps.
std::string print_instruction_inline(const InstrPtr& i);

std::string print_program(const Program& p);

}  // namespace albert
