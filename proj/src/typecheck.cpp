#include "typecheck.hpp"

#include <map>
#include <set>

namespace marol {

namespace {

struct Bail {};

struct FunSig {
    std::vector<Type> params;
    Type result;
};

// Library signatures per Appendix-style funtype table; T = var 1, U = var 2.
const FunSig* signature(const std::string& name) {
    static const std::map<std::string, FunSig> sigs = [] {
        Type T = Type::type_var(1), U = Type::type_var(2);
        std::map<std::string, FunSig> m;
        m["push"] = {{Type::list(T), T}, Type::list(T)};
        m["concat"] = {{Type::list(T), Type::list(T)}, Type::list(T)};
        m["contains"] = {{Type::list(T), T}, Type::boolean()};
        m["combinations"] = {{Type::list(T), Type::integer()}, Type::list(Type::list(T))};
        m["map"] = {{Type::fun({T}, U), Type::list(T)}, Type::list(U)};
        m["fold"] = {{U, Type::fun({U, T}, U), Type::list(T)}, U};
        m["edges"] = {{Type::arch()}, Type::list(Type::pair(Type::loc(), Type::loc()))};
        m["edges_between"] = {{Type::arch(), Type::loc(), Type::loc()},
                              Type::list(Type::pair(Type::loc(), Type::loc()))};
        m["all_paths"] = {{Type::arch(), Type::list(Type::loc()), Type::list(Type::loc()),
                           Type::list(Type::loc())},
                          Type::list(Type::list(Type::loc()))};
        m["steiner_trees"] = {{Type::arch(), Type::list(Type::loc()), Type::list(Type::loc())},
                              Type::list(Type::list(Type::loc()))};
        m["qubits"] = {{Type::instr()}, Type::list(Type::qubit())};
        m["gate_type"] = {{Type::instr()}, Type::string()};
        m["horizontal_neighbors"] = {{Type::loc(), Type::integer()}, Type::list(Type::loc())};
        m["vertical_neighbors"] = {{Type::loc(), Type::integer(), Type::integer()},
                                   Type::list(Type::loc())};
        m["to_2d"] = {{Type::loc(), Type::integer()}, Type::pair(Type::integer(), Type::integer())};
        m["value_swap"] = {{Type::qubit_map(), Type::loc(), Type::loc()}, Type::qubit_map()};
        return m;
    }();
    auto it = sigs.find(name);
    return it == sigs.end() ? nullptr : &it->second;
}

bool is_reserved(const std::string& name) {
    static const std::set<std::string> reserved = {
        "Arch", "State", "Instr", "Gate", "Trans", "QubitMap", "IdTrans",
        "if", "then", "else", "loc",
    };
    return reserved.count(name) > 0 || signature(name) != nullptr;
}

bool contains_var(const Type& t) {
    if (t.kind == TypeKind::Var) return true;
    for (const auto& a : t.args)
        if (contains_var(a)) return true;
    return false;
}

using Subst = std::map<int, Type>;

Type apply_subst(const Type& t, const Subst& s) {
    if (t.kind == TypeKind::Var) {
        auto it = s.find(t.var);
        return it == s.end() ? t : apply_subst(it->second, s);
    }
    Type out = t;
    for (auto& a : out.args) a = apply_subst(a, s);
    return out;
}

// One-way unification of a signature type against a concrete (var-free)
// type. Any on the concrete side matches without binding.
bool unify(const Type& sig, const Type& concrete, Subst& s) {
    Type t = apply_subst(sig, s);
    if (t.kind == TypeKind::Var) {
        if (concrete.kind == TypeKind::Any) return true;
        s[t.var] = concrete;
        return true;
    }
    if (concrete.kind == TypeKind::Any) return true;
    if (t.kind != concrete.kind || t.name != concrete.name ||
        t.args.size() != concrete.args.size())
        return false;
    for (std::size_t i = 0; i < t.args.size(); ++i)
        if (!unify(t.args[i], concrete.args[i], s)) return false;
    return true;
}

struct Env {
    bool has_state = false;
    bool has_instr = false;
    bool has_trans = false;
    bool has_qubit_map = false;
    std::vector<std::pair<std::string, Type>> locals;
};

class Checker {
public:
    explicit Checker(const MarolProgram& p) : p_(p) {}

    std::vector<TypeDiag> run() {
        {
            Env env;
            env.has_state = env.has_instr = true;
            check_def(*p_.realize_gate, env, Type::list(Type::strct("GateRealization")),
                      "realize_gate");
        }
        {
            Env env;
            env.has_state = true;
            check_def(*p_.get_transitions, env, Type::list(Type::strct("Transition")),
                      "get_transitions");
        }
        {
            Env env;
            env.has_trans = env.has_qubit_map = true;
            check_def(*p_.apply, env, Type::qubit_map(), "apply");
        }
        {
            Env env;
            env.has_trans = true;
            check_def(*p_.cost, env, Type::real(), "cost");
        }
        if (p_.get_locations) {
            Env env;
            check_def(*p_.get_locations, env, Type::list(Type::loc()), "get_locations");
        }
        if (p_.state_cost) {
            Env env;
            env.has_state = true;
            check_def(*p_.state_cost, env, Type::real(), "StateInfo cost");
        }
        check_decl(p_.realization_decl);
        check_decl(p_.transition_decl);
        if (p_.has_arch_info) check_decl(p_.arch_decl);
        return diags_;
    }

    std::vector<TypeDiag> run_one(Expr& e, const Type& expected, const ExprScope& scope) {
        Env env;
        env.has_state = scope.state;
        env.has_instr = scope.instr;
        env.has_trans = scope.trans;
        env.has_qubit_map = scope.qubit_map;
        try {
            check(e, env, expected);
        } catch (const Bail&) {
        }
        return diags_;
    }

private:
    void check_def(Expr& e, Env& env, const Type& expected, const char* what) {
        try {
            check(e, env, expected);
        } catch (const Bail&) {
            if (!diags_.empty()) diags_.back().message = std::string(what) + ": " +
                                                         diags_.back().message;
        }
    }

    void check_decl(const StructDecl& d) {
        for (const auto& [name, t] : d.fields) {
            if (!data_type(t))
                diags_.push_back({{}, d.name + "." + name + ": field type " + to_string(t) +
                                          " is not a data type"});
        }
    }

    static bool data_type(const Type& t) {
        switch (t.kind) {
            case TypeKind::Loc:
            case TypeKind::Int:
            case TypeKind::Float:
            case TypeKind::Bool:
            case TypeKind::Qubit:
                return true;
            case TypeKind::List: return data_type(t.args[0]);
            case TypeKind::Pair: return data_type(t.args[0]) && data_type(t.args[1]);
            default: return false;
        }
    }

    [[noreturn]] void fail(const Expr& e, const std::string& msg) {
        diags_.push_back({e.pos, msg});
        throw Bail{};
    }

    const StructDecl* decl_of(const std::string& name) const {
        if (name == "GateRealization") return &p_.realization_decl;
        if (name == "Transition") return &p_.transition_decl;
        return nullptr;
    }

    void check(Expr& e, Env& env, const Type& expected) {
        switch (e.kind) {
            case ExprKind::IntLit:
                if (expected.kind == TypeKind::Float && e.int_value == 0) {
                    e.coerce_to_float = true;
                    e.type = Type::real();
                    return;
                }
                break;
            case ExprKind::ListLit:
                if (expected.kind == TypeKind::List) {
                    for (auto& c : e.children) check(*c, env, expected.args[0]);
                    e.type = expected;
                    return;
                }
                break;
            case ExprKind::PairLit:
                if (expected.kind == TypeKind::Pair) {
                    check(*e.children[0], env, expected.args[0]);
                    check(*e.children[1], env, expected.args[1]);
                    e.type = expected;
                    return;
                }
                break;
            case ExprKind::If: {
                check(*e.children[0], env, Type::boolean());
                check(*e.children[1], env, expected);
                check(*e.children[2], env, expected);
                e.type = expected;
                return;
            }
            case ExprKind::Lambda: {
                if (expected.kind != TypeKind::Fun)
                    fail(e, "found a function where " + to_string(expected) + " was expected");
                check_lambda(e, env, expected);
                return;
            }
            case ExprKind::LibCall: {
                Type t = check_libcall(e, env, &expected);
                if (!types_compatible(t, expected))
                    fail(e, e.name + ": expected " + to_string(expected) + ", found " +
                                to_string(t));
                e.type = t;
                return;
            }
            default: break;
        }
        Type t = synth(e, env);
        if (!types_compatible(t, expected))
            fail(e, "expected " + to_string(expected) + ", found " + to_string(t));
    }

    // Checks a lambda against a concrete function type.
    void check_lambda(Expr& e, Env& env, const Type& fn) {
        std::size_t nparams = fn.args.size() - 1;
        if (e.params.size() != nparams)
            fail(e, "function takes " + std::to_string(e.params.size()) +
                        " parameters where " + std::to_string(nparams) + " were expected");
        for (std::size_t i = 0; i < nparams; ++i) {
            if (is_reserved(e.params[i]))
                fail(e, "parameter '" + e.params[i] + "' shadows a reserved name");
        }
        Env inner = env;
        for (std::size_t i = 0; i < nparams; ++i) {
            // a parameter left unconstrained (the list argument was an empty
            // literal) types as the wildcard: the body never runs on it
            Type pt = fn.args[i];
            if (contains_var(pt)) pt = Type::any();
            inner.locals.emplace_back(e.params[i], pt);
        }
        const Type& result = fn.args.back();
        if (contains_var(result) || result.kind == TypeKind::Any) {
            Type got = synth(*e.children[0], inner);
            e.type = fn;
            e.type.args.back() = got;
        } else {
            check(*e.children[0], inner, result);
            e.type = fn;
        }
    }

    Type check_libcall(Expr& e, Env& env, const Type* expected) {
        const FunSig* sig = signature(e.name);
        if (!sig) fail(e, "unknown function '" + e.name + "'");
        if (e.children.size() != sig->params.size())
            fail(e, e.name + ": expected " + std::to_string(sig->params.size()) +
                        " arguments, found " + std::to_string(e.children.size()));
        Subst subst;
        if (expected) unify(sig->result, *expected, subst); // best effort
        // Non-function arguments first; then lambdas with resolved parameter
        // types; coercion-aware re-check when a parameter became concrete.
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            Expr& arg = *e.children[i];
            if (arg.kind == ExprKind::Lambda) continue;
            Type pt = apply_subst(sig->params[i], subst);
            if (!contains_var(pt)) {
                check(arg, env, pt);
            } else {
                Type at = synth(arg, env);
                if (!unify(sig->params[i], at, subst))
                    fail(arg, e.name + " argument " + std::to_string(i + 1) + ": expected " +
                                  to_string(apply_subst(sig->params[i], subst)) + ", found " +
                                  to_string(at));
            }
        }
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            Expr& arg = *e.children[i];
            if (arg.kind != ExprKind::Lambda) continue;
            Type pt = apply_subst(sig->params[i], subst);
            if (pt.kind != TypeKind::Fun)
                fail(arg, e.name + " argument " + std::to_string(i + 1) +
                              ": expected " + to_string(pt) + ", found a function");
            check_lambda(arg, env, pt);
            if (!unify(sig->params[i], arg.type, subst))
                fail(arg, e.name + " argument " + std::to_string(i + 1) + ": expected " +
                              to_string(pt) + ", found " + to_string(arg.type));
        }
        Type result = apply_subst(sig->result, subst);
        erase_vars(result);
        e.type = result;
        return result;
    }

    static void erase_vars(Type& t) {
        if (t.kind == TypeKind::Var) {
            t = Type::any();
            return;
        }
        for (auto& a : t.args) erase_vars(a);
    }

    Type synth(Expr& e, Env& env) {
        Type t = synth_inner(e, env);
        e.type = t;
        return t;
    }

    Type synth_inner(Expr& e, Env& env) {
        switch (e.kind) {
            case ExprKind::IntLit: return Type::integer();
            case ExprKind::FloatLit: return Type::real();
            case ExprKind::StringLit: return Type::string();
            case ExprKind::IdTransLit: return Type::strct("Transition");
            case ExprKind::Var: return var_type(e, env);
            case ExprKind::Lambda:
                fail(e, "cannot infer the type of a function in this position");
            case ExprKind::If: {
                check(*e.children[0], env, Type::boolean());
                Type a = synth(*e.children[1], env);
                Type b = synth(*e.children[2], env);
                if (!types_compatible(a, b))
                    fail(e, "if branches have different types: " + to_string(a) + " vs " +
                                to_string(b));
                return join_types(a, b);
            }
            case ExprKind::BinOp: return binop_type(e, env);
            case ExprKind::Field: return field_type(e, env);
            case ExprKind::Proj: {
                Type r = synth(*e.children[0], env);
                if (r.kind != TypeKind::Pair)
                    fail(e, "projection on non-pair " + to_string(r));
                if (e.int_value != 0 && e.int_value != 1)
                    fail(e, "projection index must be 0 or 1");
                return r.args[static_cast<std::size_t>(e.int_value)];
            }
            case ExprKind::Index: {
                Type r = synth(*e.children[0], env);
                if (r.kind == TypeKind::List) {
                    Type i = synth(*e.children[1], env);
                    if (i.kind != TypeKind::Int && i.kind != TypeKind::Loc)
                        fail(e, "list index must be Int or Loc, found " + to_string(i));
                    return r.args[0];
                }
                if (r.kind == TypeKind::QubitMap) {
                    check(*e.children[1], env, Type::qubit());
                    return Type::loc();
                }
                fail(e, "indexing non-indexable " + to_string(r));
            }
            case ExprKind::ListLit: {
                Type elem = Type::any();
                for (auto& c : e.children) {
                    Type t = synth(*c, env);
                    if (!types_compatible(elem, t))
                        fail(*c, "list elements have different types: " + to_string(elem) +
                                     " vs " + to_string(t));
                    elem = join_types(elem, t);
                }
                return Type::list(elem);
            }
            case ExprKind::PairLit:
                return Type::pair(synth(*e.children[0], env), synth(*e.children[1], env));
            case ExprKind::StructLit: {
                const StructDecl* d = decl_of(e.name);
                if (!d) fail(e, "unknown struct '" + e.name + "'");
                if (e.field_names.size() != d->fields.size())
                    fail(e, e.name + ": expected " + std::to_string(d->fields.size()) +
                                " fields, found " + std::to_string(e.field_names.size()));
                for (std::size_t i = 0; i < e.field_names.size(); ++i) {
                    const Type* ft = d->field_type(e.field_names[i]);
                    if (!ft) fail(e, e.name + " has no field '" + e.field_names[i] + "'");
                    check(*e.children[i], env, *ft);
                }
                return Type::strct(e.name);
            }
            case ExprKind::LibCall: return check_libcall(e, env, nullptr);
            case ExprKind::App: {
                Expr& fn = *e.children[0];
                std::vector<Type> arg_types;
                for (std::size_t i = 1; i < e.children.size(); ++i)
                    arg_types.push_back(synth(*e.children[i], env));
                if (fn.kind == ExprKind::Lambda) {
                    Type want = Type::fun(arg_types, Type::any());
                    check_lambda(fn, env, want);
                    return fn.type.args.back();
                }
                Type ft = synth(fn, env);
                if (ft.kind != TypeKind::Fun)
                    fail(e, "applying non-function " + to_string(ft));
                if (ft.args.size() - 1 != arg_types.size())
                    fail(e, "function takes " + std::to_string(ft.args.size() - 1) +
                                " arguments, found " + std::to_string(arg_types.size()));
                for (std::size_t i = 0; i < arg_types.size(); ++i)
                    if (!types_compatible(ft.args[i], arg_types[i]))
                        fail(*e.children[i + 1], "argument " + std::to_string(i + 1) +
                                                     ": expected " + to_string(ft.args[i]) +
                                                     ", found " + to_string(arg_types[i]));
                return ft.args.back();
            }
            case ExprKind::LocCast:
                check(*e.children[0], env, Type::integer());
                return Type::loc();
        }
        fail(e, "unsupported expression");
    }

    Type var_type(Expr& e, Env& env) {
        for (auto it = env.locals.rbegin(); it != env.locals.rend(); ++it)
            if (it->first == e.name) return it->second;
        if (e.name == "Arch") return Type::arch();
        if (e.name == "State") {
            if (!env.has_state) fail(e, "State is not available in this definition");
            return Type::state();
        }
        if (e.name == "Instr" || e.name == "Gate") {
            if (!env.has_instr) fail(e, "Instr is not available in this definition");
            return Type::instr();
        }
        if (e.name == "Trans") {
            if (!env.has_trans) fail(e, "Trans is not available in this definition");
            return Type::strct("Transition");
        }
        if (e.name == "QubitMap") {
            if (!env.has_qubit_map) fail(e, "QubitMap is not available in this definition");
            return Type::qubit_map();
        }
        fail(e, "unknown variable '" + e.name + "'");
    }

    Type binop_type(Expr& e, Env& env) {
        Type l = synth(*e.children[0], env);
        Type r = synth(*e.children[1], env);
        auto is_zero_lit = [](const Expr& x) {
            return x.kind == ExprKind::IntLit && x.int_value == 0;
        };
        switch (e.op) {
            case BinOpKind::Eq:
            case BinOpKind::Ne:
                if (!types_compatible(l, r))
                    fail(e, "cannot compare " + to_string(l) + " with " + to_string(r));
                return Type::boolean();
            case BinOpKind::Lt:
            case BinOpKind::Le:
            case BinOpKind::Gt:
            case BinOpKind::Ge:
                if (l.kind == TypeKind::Any || r.kind == TypeKind::Any) return Type::boolean();
                if (!((l.kind == TypeKind::Int && r.kind == TypeKind::Int) ||
                      (l.kind == TypeKind::Float && r.kind == TypeKind::Float)))
                    fail(e, "cannot order " + to_string(l) + " and " + to_string(r));
                return Type::boolean();
            default: break;
        }
        if (l.kind == TypeKind::Any) return r;
        if (r.kind == TypeKind::Any) return l;
        if (l.kind == TypeKind::Int && r.kind == TypeKind::Int) return Type::integer();
        if (l.kind == TypeKind::Float && r.kind == TypeKind::Float) return Type::real();
        if (l.kind == TypeKind::Float && is_zero_lit(*e.children[1])) {
            check(*e.children[1], env, Type::real());
            return Type::real();
        }
        if (r.kind == TypeKind::Float && is_zero_lit(*e.children[0])) {
            check(*e.children[0], env, Type::real());
            return Type::real();
        }
        fail(e, "arithmetic on " + to_string(l) + " and " + to_string(r));
    }

    Type field_type(Expr& e, Env& env) {
        Type r = synth(*e.children[0], env);
        switch (r.kind) {
            case TypeKind::StateT:
                if (e.name == "map") return Type::qubit_map();
                if (e.name == "route") return Type::list(Type::instr());
                fail(e, "State has no field '" + e.name + "'");
            case TypeKind::InstrT: {
                if (e.name == "qubits") return Type::list(Type::qubit());
                if (e.name == "gate_type") return Type::string();
                // a routed instruction exposes its realization's fields
                if (const Type* ft = p_.realization_decl.field_type(e.name)) return *ft;
                fail(e, "Instr has no field '" + e.name + "'");
            }
            case TypeKind::ArchT: {
                if (p_.has_arch_info)
                    if (const Type* ft = p_.arch_decl.field_type(e.name)) return *ft;
                fail(e, "Arch has no declared field '" + e.name + "'");
            }
            case TypeKind::Struct: {
                const StructDecl* d = decl_of(r.name);
                if (d)
                    if (const Type* ft = d->field_type(e.name)) return *ft;
                fail(e, r.name + " has no field '" + e.name + "'");
            }
            default:
                fail(e, "field access on " + to_string(r));
        }
    }

    const MarolProgram& p_;
    std::vector<TypeDiag> diags_;
};

} // namespace

void typecheck(MarolProgram& p) {
    Checker checker(p);
    auto diags = checker.run();
    if (!diags.empty()) throw TypeErrors(std::move(diags));
}

void typecheck_expression(const MarolProgram& context, Expr& e, const Type& expected,
                          const ExprScope& scope) {
    Checker checker(context);
    auto diags = checker.run_one(e, expected, scope);
    if (!diags.empty()) throw TypeErrors(std::move(diags));
}

}  // namespace marol
