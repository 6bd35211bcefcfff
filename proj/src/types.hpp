#pragma once

#include <string>
#include <vector>

namespace marol {

// Marol types. `Any` is the element type of an empty list literal and
// unifies with everything; `Var` only appears inside library signatures.
enum class TypeKind {
    Loc,
    Int,
    Float,
    Bool,
    Qubit,
    String,
    List,
    Pair,
    Fun,
    Struct,   // named: GateRealization / Transition
    ArchT,
    InstrT,
    StateT,
    QubitMap,
    Any,
    Var,
};

struct Type {
    TypeKind kind = TypeKind::Any;
    std::vector<Type> args;   // List: [elem]; Pair: [a, b]; Fun: params + result
    std::string name;         // Struct name
    int var = 0;              // Var id

    static Type loc() { return {TypeKind::Loc, {}, "", 0}; }
    static Type integer() { return {TypeKind::Int, {}, "", 0}; }
    static Type real() { return {TypeKind::Float, {}, "", 0}; }
    static Type boolean() { return {TypeKind::Bool, {}, "", 0}; }
    static Type qubit() { return {TypeKind::Qubit, {}, "", 0}; }
    static Type string() { return {TypeKind::String, {}, "", 0}; }
    static Type any() { return {TypeKind::Any, {}, "", 0}; }
    static Type type_var(int id) { return {TypeKind::Var, {}, "", id}; }
    static Type list(Type elem) { return {TypeKind::List, {std::move(elem)}, "", 0}; }
    static Type pair(Type a, Type b) { return {TypeKind::Pair, {std::move(a), std::move(b)}, "", 0}; }
    static Type fun(std::vector<Type> params, Type result) {
        Type t{TypeKind::Fun, std::move(params), "", 0};
        t.args.push_back(std::move(result));
        return t;
    }
    static Type strct(std::string name) { return {TypeKind::Struct, {}, std::move(name), 0}; }
    static Type arch() { return {TypeKind::ArchT, {}, "", 0}; }
    static Type instr() { return {TypeKind::InstrT, {}, "", 0}; }
    static Type state() { return {TypeKind::StateT, {}, "", 0}; }
    static Type qubit_map() { return {TypeKind::QubitMap, {}, "", 0}; }
};

bool operator==(const Type& a, const Type& b);
inline bool operator!=(const Type& a, const Type& b) { return !(a == b); }

// Structural compatibility where Any matches anything.
bool types_compatible(const Type& a, const Type& b);

// Least specific common refinement of two compatible types (Any yields to
// the other side). Callers must check compatibility first.
Type join_types(const Type& a, const Type& b);

std::string to_string(const Type& t);

}  // namespace marol
