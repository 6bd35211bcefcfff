#pragma once

#include "ast.hpp"

namespace marol {

// Checks every mandatory definition of `p` at its required signature,
// annotating AST nodes with types and literal coercions. Throws TypeErrors
// carrying one diagnostic per failed definition (expression span plus
// expected-vs-found types).
void typecheck(MarolProgram& p);

// Which implicit constants a standalone expression may reference.
struct ExprScope {
    bool state = false;
    bool instr = false;
    bool trans = false;
    bool qubit_map = false;
};

// Checks one expression against an expected type under `context`'s
// declarations (struct decls, ArchInfo). Throws TypeErrors.
void typecheck_expression(const MarolProgram& context, Expr& e, const Type& expected,
                          const ExprScope& scope);

}  // namespace marol
