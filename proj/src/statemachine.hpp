#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arch_io.hpp"
#include "circuit.hpp"
#include "eval.hpp"
#include "value.hpp"

namespace marol {

// One solver-chosen gate routing, in derivation (insertion) order.
struct RouteEntry {
    const Instruction* instr = nullptr;
    Value realization;
};

// A device state: an injective qubit map plus the routed instructions in the
// order they were derived. The recorded order is the RealIns witness the
// validator replays.
struct DeviceState {
    Value map; // QubitMap value
    std::vector<RouteEntry> routes;

    bool routes_instr(int index) const {
        for (const auto& r : routes)
            if (r.instr->index == index) return true;
        return false;
    }
};

struct SolutionStep {
    DeviceState state;
    std::vector<int> nonrouted;   // attached single-qubit instructions
    Value transition;             // IdTrans on the final step
    double transition_cost = 0.0;
    double state_cost = 0.0;
};

struct Solution {
    std::vector<SolutionStep> steps;
    double total_cost = 0.0;
};

double solution_cost(const Solution& sol);

struct Violation {
    int step = -1; // -1: whole-solution violation
    std::string rule;
    std::string message;
};

// Program + arch + location universe; the immutable context every solver
// worker shares.
class StateMachine {
public:
    StateMachine(const MarolProgram* program, LoadedArch arch, PathBounds bounds = {});

    const MarolProgram& program() const { return *program_; }
    const ArchGraph& graph() const { return *arch_.graph; }
    const EvalContext& ctx() const { return ctx_; }
    const std::vector<int>& locs() const { return locs_; }
    bool loc_allowed(int l) const;
    bool noninterfering() const { return noninterfering_; }

    Value state_value(const DeviceState& s) const;
    Value make_instr_value(const Instruction& ins) const;

    // All candidate realizations for `ins` against `state`.
    std::vector<Value> realize(const DeviceState& state, const Instruction& ins) const;

    // Re-derives the state by replaying the recorded insertion order;
    // also enforces range(map) within Locs and the domain invariants.
    bool is_real(const DeviceState& s, std::string* why = nullptr) const;

    // (apply(trans, map), cost(trans)).
    std::pair<Value, double> step(const DeviceState& s, const Value& trans) const;

    // Transitions for `state` (IdTrans first) with their costs. When
    // get_transitions never reads State, both are evaluated once per arch
    // and reused; costs depend only on the transition, so they ride along.
    void transitions_with_costs(const DeviceState& s, std::vector<Value>& trans,
                                std::vector<double>& costs) const;

    std::vector<Violation> validate_solution(const Circuit& circuit, const Solution& sol) const;

private:
    const MarolProgram* program_;
    LoadedArch arch_;
    EvalContext ctx_;
    std::vector<int> locs_;
    std::vector<bool> loc_allowed_;
    bool noninterfering_ = false;
    bool transitions_cacheable_ = false;
    std::vector<Value> cached_transitions_; // IdTrans first
    std::vector<double> cached_costs_;
};

// JSON round-trip of solutions (schema documented in the README).
std::string solution_to_json(const Solution& sol);
Solution solution_from_json(const std::string& text, const MarolProgram& program,
                            const Circuit& circuit);

// Injective map value over the circuit's qubits; locs[i] hosts qubit i (in
// ascending qubit-id order).
Value make_qubit_map(const Circuit& circuit, const std::vector<int>& locs);

}  // namespace marol
