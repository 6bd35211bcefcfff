#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ast.hpp"
#include "value.hpp"

namespace marol {

// Shared evaluation context for one (program, arch) pair. Immutable and safe
// to use from concurrent solver workers; the fuel budget is per-call.
struct EvalContext {
    const MarolProgram* program = nullptr;
    std::shared_ptr<const ArchData> arch;
    PathBounds bounds;
    long long fuel_budget = 20'000'000; // per top-level call; trips as EvalError
};

// Variable bindings for one evaluation. Implicit constants are optional;
// lambda parameters are pushed while folding/mapping.
struct EvalEnv {
    std::optional<Value> state;
    std::optional<Value> instr;
    std::optional<Value> trans;
    std::optional<Value> qubit_map;
    std::vector<std::pair<std::string, Value>> locals;
};

// Evaluates a typechecked expression to a value. Deterministic and pure;
// throws EvalError when evaluation would get stuck.
Value eval(const EvalContext& ctx, const Expr& e, const EvalEnv& env);

Value make_state_value(Value map, std::vector<Value> route_entries);

// Program entry points used by the state machine and solver.
std::vector<Value> call_realize_gate(const EvalContext& ctx, const Value& state,
                                     const Value& instr);
// IdTrans prepended.
std::vector<Value> call_get_transitions(const EvalContext& ctx, const Value& state);
// IdTrans short-circuits; enforces injectivity of the result.
Value call_apply(const EvalContext& ctx, const Value& trans, const Value& qubit_map);
// Finite and non-negative, else EvalError.
double call_cost(const EvalContext& ctx, const Value& trans);
// 0.0 when StateInfo is absent.
double call_state_cost(const EvalContext& ctx, const Value& state);
// Locations from get_locations, else all arch vertices.
std::vector<int> call_get_locations(const EvalContext& ctx);

}  // namespace marol
