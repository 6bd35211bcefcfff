#include "eval.hpp"

#include <algorithm>
#include <cmath>

#include "diagnostics.hpp"

namespace marol {

namespace {

struct Frame {
    const EvalContext* ctx;
    const EvalEnv* env;
    mutable long long fuel;
    // lambda bindings introduced during this evaluation
    std::vector<std::pair<std::string, Value>> locals;

    void burn() const {
        if (--fuel <= 0) throw EvalError("evaluation fuel exhausted (runaway expression)");
    }
};

Value eval_expr(Frame& f, const Expr& e);

Value lookup_var(Frame& f, const Expr& e) {
    for (auto it = f.locals.rbegin(); it != f.locals.rend(); ++it)
        if (it->first == e.name) return it->second;
    for (auto it = f.env->locals.rbegin(); it != f.env->locals.rend(); ++it)
        if (it->first == e.name) return it->second;
    if (e.name == "Arch") return Value::arch(f.ctx->arch);
    if (e.name == "State" && f.env->state) return *f.env->state;
    if ((e.name == "Instr" || e.name == "Gate") && f.env->instr) return *f.env->instr;
    if (e.name == "Trans" && f.env->trans) return *f.env->trans;
    if (e.name == "QubitMap" && f.env->qubit_map) return *f.env->qubit_map;
    throw EvalError("unbound variable '" + e.name + "'");
}

Value apply_closure(Frame& f, const Value& fn, const std::vector<Value>& args) {
    const ClosureData& c = fn.as_closure();
    if (c.lambda->params.size() != args.size())
        throw EvalError("function applied to " + std::to_string(args.size()) +
                        " arguments, expected " + std::to_string(c.lambda->params.size()));
    std::size_t base = f.locals.size();
    for (const auto& cap : c.captured) f.locals.push_back(cap);
    for (std::size_t i = 0; i < args.size(); ++i)
        f.locals.emplace_back(c.lambda->params[i], args[i]);
    Value out = eval_expr(f, *c.lambda->children[0]);
    f.locals.resize(base);
    return out;
}

Value eval_binop(Frame& f, const Expr& e) {
    Value l = eval_expr(f, *e.children[0]);
    Value r = eval_expr(f, *e.children[1]);
    switch (e.op) {
        case BinOpKind::Eq: return Value::boolean(values_equal(l, r));
        case BinOpKind::Ne: return Value::boolean(!values_equal(l, r));
        default: break;
    }
    if (l.kind() == ValueKind::Int && r.kind() == ValueKind::Int) {
        long long a = l.as_int(), b = r.as_int();
        switch (e.op) {
            case BinOpKind::Add: return Value::integer(a + b);
            case BinOpKind::Sub: return Value::integer(a - b);
            case BinOpKind::Mul: return Value::integer(a * b);
            case BinOpKind::Div:
                if (b == 0) throw EvalError("integer division by zero");
                return Value::integer(a / b);
            case BinOpKind::Lt: return Value::boolean(a < b);
            case BinOpKind::Le: return Value::boolean(a <= b);
            case BinOpKind::Gt: return Value::boolean(a > b);
            case BinOpKind::Ge: return Value::boolean(a >= b);
            default: break;
        }
    }
    if (l.kind() == ValueKind::Float && r.kind() == ValueKind::Float) {
        double a = l.as_float(), b = r.as_float();
        switch (e.op) {
            case BinOpKind::Add: return Value::real(a + b);
            case BinOpKind::Sub: return Value::real(a - b);
            case BinOpKind::Mul: return Value::real(a * b);
            case BinOpKind::Div: return Value::real(a / b);
            case BinOpKind::Lt: return Value::boolean(a < b);
            case BinOpKind::Le: return Value::boolean(a <= b);
            case BinOpKind::Gt: return Value::boolean(a > b);
            case BinOpKind::Ge: return Value::boolean(a >= b);
            default: break;
        }
    }
    throw EvalError("arithmetic on " + l.describe() + " and " + r.describe());
}

Value eval_field(Frame& f, const Expr& e) {
    Value recv = eval_expr(f, *e.children[0]);
    switch (recv.kind()) {
        case ValueKind::StateH:
            if (e.name == "map") return recv.state_map();
            if (e.name == "route") return Value::list(recv.state_route());
            break;
        case ValueKind::InstrH: {
            const InstrData& d = recv.as_instr();
            if (e.name == "qubits") {
                std::vector<Value> qs;
                for (int q : d.instr->qubits) qs.push_back(Value::qubit(q));
                return Value::list(std::move(qs));
            }
            if (e.name == "gate_type") return Value::str(d.instr->gate);
            if (d.realization)
                if (const Value* v = d.realization->as_struct().field(e.name)) return *v;
            break;
        }
        case ValueKind::ArchH: {
            if (const Value* v = recv.as_arch().field(e.name)) return *v;
            break;
        }
        case ValueKind::Struct: {
            if (const Value* v = recv.as_struct().field(e.name)) return *v;
            break;
        }
        default: break;
    }
    throw EvalError("no field '" + e.name + "' on " + recv.describe());
}

Value eval_index(Frame& f, const Expr& e) {
    Value recv = eval_expr(f, *e.children[0]);
    Value idx = eval_expr(f, *e.children[1]);
    if (recv.kind() == ValueKind::List) {
        long long i = idx.kind() == ValueKind::Loc ? idx.as_loc() : idx.as_int();
        const auto& elems = recv.as_list();
        if (i < 0 || i >= static_cast<long long>(elems.size()))
            throw EvalError("list index " + std::to_string(i) + " out of bounds (size " +
                            std::to_string(elems.size()) + ")");
        return elems[static_cast<std::size_t>(i)];
    }
    if (recv.kind() == ValueKind::QubitMap)
        return Value::loc(recv.as_qubit_map().loc_of(idx.as_qubit()));
    throw EvalError("indexing " + recv.describe());
}

int loc_arg(Frame& f, const Expr& e) { return eval_expr(f, e).as_loc(); }

std::vector<int> loc_list_arg(Frame& f, const Expr& e) {
    std::vector<int> out;
    Value list_value = eval_expr(f, e);
    for (const auto& v : list_value.as_list()) out.push_back(v.as_loc());
    return out;
}

Value locs_to_value(const std::vector<int>& locs) {
    std::vector<Value> out;
    out.reserve(locs.size());
    for (int l : locs) out.push_back(Value::loc(l));
    return Value::list(std::move(out));
}

Value eval_libcall(Frame& f, const Expr& e) {
    const std::string& fn = e.name;
    if (fn == "push") {
        auto list = eval_expr(f, *e.children[0]).as_list();
        list.push_back(eval_expr(f, *e.children[1]));
        return Value::list(std::move(list));
    }
    if (fn == "concat") {
        auto list = eval_expr(f, *e.children[0]).as_list();
        Value tail_value = eval_expr(f, *e.children[1]);
        const auto& tail = tail_value.as_list();
        list.insert(list.end(), tail.begin(), tail.end());
        return Value::list(std::move(list));
    }
    if (fn == "contains") {
        Value list_value = eval_expr(f, *e.children[0]);
        const auto& list = list_value.as_list();
        Value needle = eval_expr(f, *e.children[1]);
        for (const auto& v : list)
            if (values_equal(v, needle)) return Value::boolean(true);
        return Value::boolean(false);
    }
    if (fn == "combinations") {
        const auto list = eval_expr(f, *e.children[0]).as_list();
        long long k = eval_expr(f, *e.children[1]).as_int();
        if (k < 0) throw EvalError("combinations: negative size");
        std::vector<Value> out;
        std::vector<std::size_t> pick;
        // index-lexicographic k-subsets
        auto emit = [&](auto&& self, std::size_t start) -> void {
            f.burn();
            if (pick.size() == static_cast<std::size_t>(k)) {
                std::vector<Value> combo;
                for (std::size_t i : pick) combo.push_back(list[i]);
                out.push_back(Value::list(std::move(combo)));
                return;
            }
            for (std::size_t i = start; i < list.size(); ++i) {
                pick.push_back(i);
                self(self, i + 1);
                pick.pop_back();
            }
        };
        if (k <= static_cast<long long>(list.size())) emit(emit, 0);
        return Value::list(std::move(out));
    }
    if (fn == "map") {
        Value fun = eval_expr(f, *e.children[0]);
        Value list_value = eval_expr(f, *e.children[1]);
        const auto& list = list_value.as_list();
        std::vector<Value> out;
        out.reserve(list.size());
        for (const auto& v : list) {
            f.burn();
            out.push_back(apply_closure(f, fun, {v}));
        }
        return Value::list(std::move(out));
    }
    if (fn == "fold") {
        Value acc = eval_expr(f, *e.children[0]);
        Value fun = eval_expr(f, *e.children[1]);
        Value list_value = eval_expr(f, *e.children[2]);
        const auto& list = list_value.as_list();
        for (const auto& v : list) {
            f.burn();
            acc = apply_closure(f, fun, {acc, v});
        }
        return acc;
    }
    if (fn == "edges") {
        Value arch_value = eval_expr(f, *e.children[0]);
        const ArchData& arch = arch_value.as_arch();
        std::vector<Value> out;
        for (auto [u, v] : arch.graph->edges())
            out.push_back(Value::pair(Value::loc(u), Value::loc(v)));
        return Value::list(std::move(out));
    }
    if (fn == "edges_between") {
        Value arch_value = eval_expr(f, *e.children[0]);
        const ArchData& arch = arch_value.as_arch();
        int u = loc_arg(f, *e.children[1]);
        int v = loc_arg(f, *e.children[2]);
        std::vector<Value> out;
        if (u != v && arch.graph->has_edge(u, v))
            out.push_back(Value::pair(Value::loc(u), Value::loc(v)));
        return Value::list(std::move(out));
    }
    if (fn == "all_paths") {
        Value arch_value = eval_expr(f, *e.children[0]);
        const ArchData& arch = arch_value.as_arch();
        auto sources = loc_list_arg(f, *e.children[1]);
        auto targets = loc_list_arg(f, *e.children[2]);
        auto blocked = loc_list_arg(f, *e.children[3]);
        auto paths = arch.graph->all_paths(sources, targets, blocked, f.ctx->bounds);
        std::vector<Value> out;
        out.reserve(paths.size());
        for (const auto& p : paths) out.push_back(locs_to_value(p));
        return Value::list(std::move(out));
    }
    if (fn == "steiner_trees") {
        Value arch_value = eval_expr(f, *e.children[0]);
        const ArchData& arch = arch_value.as_arch();
        auto terminals = loc_list_arg(f, *e.children[1]);
        auto blocked = loc_list_arg(f, *e.children[2]);
        auto trees = arch.graph->steiner_trees(terminals, blocked, f.ctx->bounds);
        std::vector<Value> out;
        out.reserve(trees.size());
        for (const auto& t : trees) out.push_back(locs_to_value(t));
        return Value::list(std::move(out));
    }
    if (fn == "qubits" || fn == "gate_type") {
        Value instr_value = eval_expr(f, *e.children[0]);
        const InstrData& d = instr_value.as_instr();
        if (fn == "gate_type") return Value::str(d.instr->gate);
        std::vector<Value> qs;
        for (int q : d.instr->qubits) qs.push_back(Value::qubit(q));
        return Value::list(std::move(qs));
    }
    if (fn == "horizontal_neighbors") {
        int l = loc_arg(f, *e.children[0]);
        long long w = eval_expr(f, *e.children[1]).as_int();
        return locs_to_value(grid_horizontal_neighbors(l, static_cast<int>(w)));
    }
    if (fn == "vertical_neighbors") {
        int l = loc_arg(f, *e.children[0]);
        long long w = eval_expr(f, *e.children[1]).as_int();
        long long h = eval_expr(f, *e.children[2]).as_int();
        return locs_to_value(grid_vertical_neighbors(l, static_cast<int>(w), static_cast<int>(h)));
    }
    if (fn == "to_2d") {
        int l = loc_arg(f, *e.children[0]);
        long long w = eval_expr(f, *e.children[1]).as_int();
        auto [row, col] = grid_to_2d(l, static_cast<int>(w));
        return Value::pair(Value::integer(row), Value::integer(col));
    }
    if (fn == "value_swap") {
        QubitMapData m = eval_expr(f, *e.children[0]).as_qubit_map();
        int l1 = loc_arg(f, *e.children[1]);
        int l2 = loc_arg(f, *e.children[2]);
        int q1 = m.qubit_at(l1);
        int q2 = m.qubit_at(l2);
        auto set = [&](int qubit, int loc) {
            auto it = std::lower_bound(m.qubit_ids->begin(), m.qubit_ids->end(), qubit);
            m.locs[static_cast<std::size_t>(it - m.qubit_ids->begin())] = loc;
        };
        if (q1 >= 0) set(q1, l2);
        if (q2 >= 0) set(q2, l1);
        return Value::qubit_map(std::move(m));
    }
    throw EvalError("unknown library function '" + fn + "'");
}

Value eval_expr(Frame& f, const Expr& e) {
    f.burn();
    switch (e.kind) {
        case ExprKind::IntLit:
            return e.coerce_to_float ? Value::real(0.0) : Value::integer(e.int_value);
        case ExprKind::FloatLit: return Value::real(e.float_value);
        case ExprKind::StringLit: return Value::str(e.name);
        case ExprKind::IdTransLit: return Value::id_trans();
        case ExprKind::Var: return lookup_var(f, e);
        case ExprKind::Lambda: {
            // capture current lambda bindings by value
            std::vector<std::pair<std::string, Value>> captured = f.locals;
            return Value::closure(&e, std::move(captured));
        }
        case ExprKind::If:
            return eval_expr(f, *e.children[0]).as_bool() ? eval_expr(f, *e.children[1])
                                                          : eval_expr(f, *e.children[2]);
        case ExprKind::BinOp: return eval_binop(f, e);
        case ExprKind::Field: return eval_field(f, e);
        case ExprKind::Proj: {
            Value pair_value = eval_expr(f, *e.children[0]);
            const auto& p = pair_value.as_pair();
            return e.int_value == 0 ? p.first : p.second;
        }
        case ExprKind::Index: return eval_index(f, e);
        case ExprKind::ListLit: {
            std::vector<Value> out;
            out.reserve(e.children.size());
            for (const auto& c : e.children) out.push_back(eval_expr(f, *c));
            return Value::list(std::move(out));
        }
        case ExprKind::PairLit:
            return Value::pair(eval_expr(f, *e.children[0]), eval_expr(f, *e.children[1]));
        case ExprKind::StructLit: {
            std::vector<std::pair<std::string, Value>> fields;
            for (std::size_t i = 0; i < e.children.size(); ++i)
                fields.emplace_back(e.field_names[i], eval_expr(f, *e.children[i]));
            // canonical order: declaration order
            const StructDecl* d = e.name == "GateRealization"
                                      ? &f.ctx->program->realization_decl
                                      : &f.ctx->program->transition_decl;
            std::vector<std::pair<std::string, Value>> ordered;
            for (const auto& [fname, _] : d->fields) {
                for (auto& fv : fields)
                    if (fv.first == fname) ordered.push_back(fv);
            }
            return Value::strct(e.name, std::move(ordered));
        }
        case ExprKind::LibCall: return eval_libcall(f, e);
        case ExprKind::App: {
            Value fun = eval_expr(f, *e.children[0]);
            std::vector<Value> args;
            for (std::size_t i = 1; i < e.children.size(); ++i)
                args.push_back(eval_expr(f, *e.children[i]));
            return apply_closure(f, fun, args);
        }
        case ExprKind::LocCast: {
            long long v = eval_expr(f, *e.children[0]).as_int();
            return Value::loc(static_cast<int>(v));
        }
    }
    throw EvalError("unsupported expression kind");
}

} // namespace

Value eval(const EvalContext& ctx, const Expr& e, const EvalEnv& env) {
    Frame f{&ctx, &env, ctx.fuel_budget, {}};
    return eval_expr(f, e);
}

Value make_state_value(Value map, std::vector<Value> route_entries) {
    return Value::state(std::make_shared<const Value>(std::move(map)),
                        std::make_shared<const std::vector<Value>>(std::move(route_entries)));
}

std::vector<Value> call_realize_gate(const EvalContext& ctx, const Value& state,
                                     const Value& instr) {
    EvalEnv env;
    env.state = state;
    env.instr = instr;
    try {
        Value listed = eval(ctx, *ctx.program->realize_gate, env);
        return listed.as_list();
    } catch (const EvalError& err) {
        throw EvalError(std::string("realize_gate: ") + err.what());
    }
}

std::vector<Value> call_get_transitions(const EvalContext& ctx, const Value& state) {
    EvalEnv env;
    env.state = state;
    std::vector<Value> out = {Value::id_trans()};
    try {
        Value listed = eval(ctx, *ctx.program->get_transitions, env);
        for (const auto& t : listed.as_list()) out.push_back(t);
    } catch (const EvalError& err) {
        throw EvalError(std::string("get_transitions: ") + err.what());
    }
    return out;
}

Value call_apply(const EvalContext& ctx, const Value& trans, const Value& qubit_map) {
    if (trans.is_id_trans()) return qubit_map;
    EvalEnv env;
    env.trans = trans;
    env.qubit_map = qubit_map;
    Value out;
    try {
        out = eval(ctx, *ctx.program->apply, env);
    } catch (const EvalError& err) {
        throw EvalError(std::string("apply: ") + err.what());
    }
    const QubitMapData& m = out.as_qubit_map();
    std::vector<int> locs = m.locs;
    std::sort(locs.begin(), locs.end());
    if (std::adjacent_find(locs.begin(), locs.end()) != locs.end())
        throw EvalError("apply: resulting qubit map is not injective");
    return out;
}

double call_cost(const EvalContext& ctx, const Value& trans) {
    EvalEnv env;
    env.trans = trans;
    double c;
    try {
        c = eval(ctx, *ctx.program->cost, env).as_float();
    } catch (const EvalError& err) {
        throw EvalError(std::string("cost: ") + err.what());
    }
    if (!std::isfinite(c) || c < 0.0)
        throw EvalError("cost: transition cost must be finite and non-negative, got " +
                        std::to_string(c));
    return c;
}

double call_state_cost(const EvalContext& ctx, const Value& state) {
    if (!ctx.program->state_cost) return 0.0;
    EvalEnv env;
    env.state = state;
    double c;
    try {
        c = eval(ctx, *ctx.program->state_cost, env).as_float();
    } catch (const EvalError& err) {
        throw EvalError(std::string("state cost: ") + err.what());
    }
    if (!std::isfinite(c) || c < 0.0)
        throw EvalError("state cost must be finite and non-negative, got " + std::to_string(c));
    return c;
}

std::vector<int> call_get_locations(const EvalContext& ctx) {
    if (!ctx.program->get_locations) {
        std::vector<int> all(static_cast<std::size_t>(ctx.arch->graph->n()));
        for (int i = 0; i < ctx.arch->graph->n(); ++i) all[static_cast<std::size_t>(i)] = i;
        return all;
    }
    EvalEnv env;
    std::vector<int> out;
    try {
        Value listed = eval(ctx, *ctx.program->get_locations, env);
        for (const auto& v : listed.as_list()) out.push_back(v.as_loc());
    } catch (const EvalError& err) {
        throw EvalError(std::string("get_locations: ") + err.what());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int l : out)
        if (l < 0 || l >= ctx.arch->graph->n())
            throw EvalError("get_locations: location " + std::to_string(l) + " out of range");
    return out;
}

}  // namespace marol
