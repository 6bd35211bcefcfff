#pragma once

#include <string>

#include "ast.hpp"

namespace marol {

// Parses Marol source into an untyped program. Throws ParseError with
// line/column on syntax errors and on missing mandatory definitions.
MarolProgram parse_program(const std::string& source);

// Parses a single expression (whole input must be consumed).
ExprPtr parse_expression(const std::string& source);

}  // namespace marol
