#include "ast.hpp"

#include <charconv>

namespace marol {

ExprPtr clone_expr(const Expr& e) {
    auto out = std::make_unique<Expr>(e.kind, e.pos);
    out->int_value = e.int_value;
    out->float_value = e.float_value;
    out->name = e.name;
    out->op = e.op;
    out->params = e.params;
    out->field_names = e.field_names;
    for (const auto& c : e.children) out->children.push_back(clone_expr(*c));
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.int_value != b.int_value || a.float_value != b.float_value ||
        a.name != b.name || a.op != b.op || a.params != b.params ||
        a.field_names != b.field_names || a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!expr_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    // keep the token a Float: 1 -> 1.0
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::If: return 0;
        case ExprKind::BinOp:
            switch (e.op) {
                case BinOpKind::Eq:
                case BinOpKind::Ne:
                case BinOpKind::Lt:
                case BinOpKind::Le:
                case BinOpKind::Gt:
                case BinOpKind::Ge: return 1;
                case BinOpKind::Add:
                case BinOpKind::Sub: return 2;
                case BinOpKind::Mul:
                case BinOpKind::Div: return 3;
            }
            return 3;
        case ExprKind::Lambda: return 0;
        default: return 4;
    }
}

const char* op_text(BinOpKind op) {
    switch (op) {
        case BinOpKind::Add: return "+";
        case BinOpKind::Sub: return "-";
        case BinOpKind::Mul: return "*";
        case BinOpKind::Div: return "/";
        case BinOpKind::Eq: return "==";
        case BinOpKind::Ne: return "!=";
        case BinOpKind::Lt: return "<";
        case BinOpKind::Le: return "<=";
        case BinOpKind::Gt: return ">";
        case BinOpKind::Ge: return ">=";
    }
    return "?";
}

void print(const Expr& e, int min_prec, std::string& out) {
    bool parens = precedence(e) < min_prec;
    if (parens) out += "(";
    switch (e.kind) {
        case ExprKind::IntLit: out += std::to_string(e.int_value); break;
        case ExprKind::FloatLit: out += format_double(e.float_value); break;
        case ExprKind::StringLit: out += "\"" + e.name + "\""; break;
        case ExprKind::Var: out += e.name; break;
        case ExprKind::IdTransLit: out += "IdTrans"; break;
        case ExprKind::Lambda: {
            out += "|";
            for (std::size_t i = 0; i < e.params.size(); ++i) {
                if (i) out += ",";
                out += e.params[i];
            }
            out += "| -> ";
            print(*e.children[0], 0, out);
            break;
        }
        case ExprKind::If:
            out += "if ";
            print(*e.children[0], 1, out);
            out += " then ";
            print(*e.children[1], 1, out);
            out += " else ";
            print(*e.children[2], 0, out);
            break;
        case ExprKind::BinOp: {
            int p = precedence(e);
            print(*e.children[0], p, out);
            out += " ";
            out += op_text(e.op);
            out += " ";
            print(*e.children[1], p + 1, out);
            break;
        }
        case ExprKind::Field:
            print(*e.children[0], 4, out);
            out += "." + e.name;
            break;
        case ExprKind::Proj:
            print(*e.children[0], 4, out);
            out += ".(" + std::to_string(e.int_value) + ")";
            break;
        case ExprKind::Index:
            print(*e.children[0], 4, out);
            out += "[";
            print(*e.children[1], 0, out);
            out += "]";
            break;
        case ExprKind::ListLit: {
            out += "[";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += ", ";
                print(*e.children[i], 0, out);
            }
            out += "]";
            break;
        }
        case ExprKind::PairLit:
            out += "(";
            print(*e.children[0], 0, out);
            out += ", ";
            print(*e.children[1], 0, out);
            out += ")";
            break;
        case ExprKind::StructLit: {
            out += e.name + "{";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += ", ";
                out += e.field_names[i] + " = ";
                print(*e.children[i], 0, out);
            }
            out += "}";
            break;
        }
        case ExprKind::LibCall: {
            out += e.name + "(";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += ", ";
                print(*e.children[i], 0, out);
            }
            out += ")";
            break;
        }
        case ExprKind::App: {
            print(*e.children[0], 4, out);
            out += "(";
            for (std::size_t i = 1; i < e.children.size(); ++i) {
                if (i > 1) out += ", ";
                print(*e.children[i], 0, out);
            }
            out += ")";
            break;
        }
        case ExprKind::LocCast:
            out += "loc(";
            print(*e.children[0], 0, out);
            out += ")";
            break;
    }
    if (parens) out += ")";
}

std::string type_source(const Type& t) {
    switch (t.kind) {
        case TypeKind::List: return "List[" + type_source(t.args[0]) + "]";
        case TypeKind::Pair:
            return "(" + type_source(t.args[0]) + ", " + type_source(t.args[1]) + ")";
        default: return to_string(t);
    }
}

void print_decl(const StructDecl& d, const std::string& keyword, std::string& out) {
    out += "  " + keyword + "{";
    for (std::size_t i = 0; i < d.fields.size(); ++i) {
        if (i) out += ", ";
        out += d.fields[i].first + " : " + type_source(d.fields[i].second);
    }
    out += "}\n";
}

} // namespace

std::string to_source(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

bool operator==(const StructDecl& a, const StructDecl& b) {
    return a.name == b.name && a.fields == b.fields;
}

bool program_equal(const MarolProgram& a, const MarolProgram& b) {
    auto expr_eq = [](const ExprPtr& x, const ExprPtr& y) {
        if (!x || !y) return !x && !y;
        return expr_equal(*x, *y);
    };
    return a.realization_decl == b.realization_decl && a.routed_gates == b.routed_gates &&
           expr_eq(a.realize_gate, b.realize_gate) && a.transition_decl == b.transition_decl &&
           expr_eq(a.get_transitions, b.get_transitions) && expr_eq(a.apply, b.apply) &&
           expr_eq(a.cost, b.cost) && a.has_arch_info == b.has_arch_info &&
           a.arch_decl == b.arch_decl && expr_eq(a.get_locations, b.get_locations) &&
           expr_eq(a.state_cost, b.state_cost);
}

std::string to_source(const MarolProgram& p) {
    std::string out = "RouteInfo:\n";
    print_decl(p.realization_decl, "GateRealization", out);
    out += "  routed_gates = [";
    for (std::size_t i = 0; i < p.routed_gates.size(); ++i) {
        if (i) out += ", ";
        out += p.routed_gates[i];
    }
    out += "]\n";
    out += "  realize_gate = " + to_source(*p.realize_gate) + "\n\n";

    out += "TransitionInfo:\n";
    print_decl(p.transition_decl, "Transition", out);
    out += "  get_transitions = " + to_source(*p.get_transitions) + "\n";
    out += "  apply = " + to_source(*p.apply) + "\n";
    out += "  cost = " + to_source(*p.cost) + "\n";

    if (p.has_arch_info) {
        out += "\nArchInfo:\n";
        print_decl(p.arch_decl, "Arch", out);
        if (p.get_locations) out += "  get_locations = " + to_source(*p.get_locations) + "\n";
    }
    if (p.state_cost) {
        out += "\nStateInfo:\n";
        out += "  cost = " + to_source(*p.state_cost) + "\n";
    }
    return out;
}

namespace {

bool mentions_state_route(const Expr& e) {
    if (e.kind == ExprKind::Field && e.name == "route" &&
        e.children[0]->kind == ExprKind::Var && e.children[0]->name == "State")
        return true;
    for (const auto& c : e.children)
        if (mentions_state_route(*c)) return true;
    return false;
}

} // namespace

bool analyze_noninterference(const MarolProgram& p) {
    return !mentions_state_route(*p.realize_gate);
}

bool expr_mentions_var(const Expr& e, const std::string& name) {
    if (e.kind == ExprKind::Var && e.name == name) return true;
    for (const auto& c : e.children)
        if (expr_mentions_var(*c, name)) return true;
    return false;
}

}  // namespace marol
