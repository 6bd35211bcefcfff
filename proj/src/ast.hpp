#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "types.hpp"

namespace marol {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class ExprKind {
    IntLit,
    FloatLit,
    StringLit,
    Var,          // variables and the implicit constants (Arch, State, ...)
    IdTransLit,
    Lambda,
    If,
    BinOp,
    Field,        // e.x  (struct fields, State.map, Instr.qubits, Arch.<field>)
    Proj,         // e.(i)
    Index,        // e[e]
    ListLit,
    PairLit,
    StructLit,    // GateRealization{...} / Transition{...}
    LibCall,      // fixed library function F(e...)
    App,          // closure application e(e...)
    LocCast,      // loc(e)
};

enum class BinOpKind { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge };

struct Expr {
    ExprKind kind;
    SourcePos pos;

    long long int_value = 0;
    double float_value = 0.0;
    std::string name;                 // Var/Field/StructLit/LibCall identifier
    BinOpKind op = BinOpKind::Add;
    std::vector<std::string> params;  // Lambda
    std::vector<ExprPtr> children;
    std::vector<std::string> field_names; // StructLit, parallel to children

    // Typecheck annotations.
    mutable Type type = Type::any();
    mutable bool coerce_to_float = false; // literal 0 in a Float position

    explicit Expr(ExprKind k, SourcePos p = {}) : kind(k), pos(p) {}
};

ExprPtr clone_expr(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);
std::string to_source(const Expr& e);

struct StructDecl {
    std::string name;
    std::vector<std::pair<std::string, Type>> fields;

    const Type* field_type(const std::string& f) const {
        for (const auto& [n, t] : fields)
            if (n == f) return &t;
        return nullptr;
    }
    int field_index(const std::string& f) const {
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (fields[i].first == f) return static_cast<int>(i);
        return -1;
    }
};

bool operator==(const StructDecl& a, const StructDecl& b);

// A parsed Marol program: the four definition blocks.
struct MarolProgram {
    StructDecl realization_decl;          // GateRealization{...}
    std::vector<std::string> routed_gates; // canonical lowercase
    ExprPtr realize_gate;

    StructDecl transition_decl;           // Transition{...}
    ExprPtr get_transitions;
    ExprPtr apply;
    ExprPtr cost;

    bool has_arch_info = false;
    StructDecl arch_decl;                 // Arch{...}; empty when block absent
    ExprPtr get_locations;                // may be null even when block present

    ExprPtr state_cost;                   // null when StateInfo absent

    std::string source;                   // original text

    bool routes_gate(const std::string& gate) const {
        for (const auto& g : routed_gates)
            if (g == gate) return true;
        return false;
    }
};

bool program_equal(const MarolProgram& a, const MarolProgram& b);
std::string to_source(const MarolProgram& p);

// True iff realize_gate never reads State.route (sound over-approximation of
// non-interference; syntactic, so a dead-branch access still counts).
bool analyze_noninterference(const MarolProgram& p);

// True iff the expression mentions the given implicit constant anywhere.
bool expr_mentions_var(const Expr& e, const std::string& name);

}  // namespace marol
