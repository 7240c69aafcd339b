// Hand-rolled lexer + recursive-descent parser for .alb sources.
//
// Total: every input yields either an AST or a ParseError with a 1-based
// line/column; the process is never aborted. `#` starts a comment running to
// end of line; strings know the escapes \" and \\.
#pragma once

#include <stdexcept>
#include <string>

#include "albert/ast.hpp"

namespace albert {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& message)
      : std::runtime_error(message), line(line), col(col) {}
};

Program parse_program(const std::string& source);

// Parses a single self-contained value literal (the CLI's --input syntax).
// Trailing garbage is an error.
ValuePtr parse_value_text(const std::string& source);

// Parses a single type (used by tests and tooling).
TypePtr parse_type_text(const std::string& source);

}  // namespace albert
