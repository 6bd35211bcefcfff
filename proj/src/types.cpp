#include "types.hpp"

namespace marol {

bool operator==(const Type& a, const Type& b) {
    if (a.kind != b.kind || a.name != b.name || a.var != b.var) return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!(a.args[i] == b.args[i])) return false;
    return true;
}

bool types_compatible(const Type& a, const Type& b) {
    if (a.kind == TypeKind::Any || b.kind == TypeKind::Any) return true;
    if (a.kind != b.kind || a.name != b.name) return false;
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!types_compatible(a.args[i], b.args[i])) return false;
    return true;
}

Type join_types(const Type& a, const Type& b) {
    if (a.kind == TypeKind::Any) return b;
    if (b.kind == TypeKind::Any) return a;
    Type out = a;
    for (std::size_t i = 0; i < out.args.size() && i < b.args.size(); ++i)
        out.args[i] = join_types(a.args[i], b.args[i]);
    return out;
}

std::string to_string(const Type& t) {
    switch (t.kind) {
        case TypeKind::Loc: return "Loc";
        case TypeKind::Int: return "Int";
        case TypeKind::Float: return "Float";
        case TypeKind::Bool: return "Bool";
        case TypeKind::Qubit: return "Qubit";
        case TypeKind::String: return "String";
        case TypeKind::List: return "List[" + to_string(t.args[0]) + "]";
        case TypeKind::Pair: return "(" + to_string(t.args[0]) + ", " + to_string(t.args[1]) + ")";
        case TypeKind::Fun: {
            std::string s = "(";
            for (std::size_t i = 0; i + 1 < t.args.size(); ++i) {
                if (i) s += ", ";
                s += to_string(t.args[i]);
            }
            return s + ") -> " + to_string(t.args.back());
        }
        case TypeKind::Struct: return t.name;
        case TypeKind::ArchT: return "Arch";
        case TypeKind::InstrT: return "Instr";
        case TypeKind::StateT: return "State";
        case TypeKind::QubitMap: return "QubitMap";
        case TypeKind::Any: return "_";
        case TypeKind::Var: return "t" + std::to_string(t.var);
    }
    return "?";
}

}  // namespace marol
