#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "diagnostics.hpp"
#include "value_json.hpp"

namespace marol {

namespace {

// Node key: qubit locations (ascending qubit order) plus the executed set.
using NodeKey = std::pair<std::vector<int>, std::uint32_t>;

std::string realization_key(const Value& v) { return encode_value(v).dump(); }

} // namespace

double brute_force_oracle(const StateMachine& sm, const Circuit& circuit,
                          const OracleBounds& bounds) {
    const int nq = circuit.qubit_count();
    const int nlocs = static_cast<int>(sm.locs().size());
    if (nq > bounds.max_qubits)
        throw LoadError("oracle bounds exceeded: " + std::to_string(nq) + " qubits > " +
                        std::to_string(bounds.max_qubits));
    if (nlocs > bounds.max_locs)
        throw LoadError("oracle bounds exceeded: " + std::to_string(nlocs) + " locations > " +
                        std::to_string(bounds.max_locs));
    if (static_cast<int>(circuit.size()) > bounds.max_instructions)
        throw LoadError("oracle bounds exceeded: " + std::to_string(circuit.size()) +
                        " instructions > " + std::to_string(bounds.max_instructions));
    if (circuit.size() > 31) throw LoadError("oracle: circuit too large for the done mask");
    for (const auto& ins : circuit.instructions())
        if (ins.multi_qubit() && !sm.program().routes_gate(ins.gate))
            throw LoadError("oracle: multi-qubit instruction " + std::to_string(ins.index) +
                            " is not routable");
    if (circuit.empty()) return 0.0;
    if (nq > nlocs) throw LoadError("oracle: more qubits than locations");

    const std::uint32_t full = (1u << circuit.size()) - 1u;

    struct Entry {
        double cost;
        long long order;
        NodeKey key;
        bool goal;
        bool operator>(const Entry& other) const {
            if (cost != other.cost) return cost > other.cost;
            return order > other.order;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    std::map<NodeKey, double> dist;
    long long order_counter = 0;

    auto push = [&](const NodeKey& key, double cost, bool goal) {
        if (!goal) {
            auto it = dist.find(key);
            if (it != dist.end() && it->second <= cost) return;
            dist[key] = cost;
        }
        queue.push({cost, order_counter++, key, goal});
    };

    // Every injective placement of the circuit qubits into Locs.
    {
        std::vector<int> placement;
        std::vector<bool> used(static_cast<std::size_t>(sm.graph().n()), false);
        auto gen = [&](auto&& self) -> void {
            if (static_cast<int>(placement.size()) == nq) {
                push({placement, 0u}, 0.0, false);
                return;
            }
            for (int l : sm.locs()) {
                if (used[static_cast<std::size_t>(l)]) continue;
                used[static_cast<std::size_t>(l)] = true;
                placement.push_back(l);
                self(self);
                placement.pop_back();
                used[static_cast<std::size_t>(l)] = false;
            }
        };
        gen(gen);
    }

    while (!queue.empty()) {
        Entry e = queue.top();
        queue.pop();
        if (e.goal) return e.cost;
        auto it = dist.find(e.key);
        if (it != dist.end() && e.cost > it->second) continue;

        const auto& [locs, done] = e.key;
        Value map = make_qubit_map(circuit, locs);

        std::set<int> removed;
        for (std::size_t i = 0; i < circuit.size(); ++i)
            if (done & (1u << i)) removed.insert(static_cast<int>(i));
        std::vector<int> front = circuit.front_layer(removed);

        std::uint32_t attach_mask = 0;
        std::vector<const Instruction*> routable;
        for (int idx : front) {
            const Instruction& ins = circuit.instructions()[static_cast<std::size_t>(idx)];
            if (sm.program().routes_gate(ins.gate))
                routable.push_back(&ins);
            else
                attach_mask |= 1u << idx;
        }

        // All derivable states over the routable front, deduplicated by
        // route content; each keeps one witness derivation order. Assumes
        // realize_gate does not depend on the order of State.route (true of
        // every bundled program).
        struct Derived {
            DeviceState state;
            std::uint32_t mask;
        };
        std::vector<Derived> states;
        std::set<std::vector<std::string>> seen;
        {
            DeviceState empty;
            empty.map = map;
            std::vector<Derived> stack = {{empty, 0u}};
            seen.insert({});
            while (!stack.empty()) {
                Derived cur = std::move(stack.back());
                stack.pop_back();
                for (const Instruction* ins : routable) {
                    if (cur.mask & (1u << ins->index)) continue;
                    std::vector<Value> candidates = sm.realize(cur.state, *ins);
                    for (const auto& c : candidates) {
                        Derived next = cur;
                        next.state.routes.push_back({ins, c});
                        next.mask |= 1u << ins->index;
                        std::vector<std::string> key;
                        for (const auto& r : next.state.routes)
                            key.push_back(std::to_string(r.instr->index) + ":" +
                                          realization_key(r.realization));
                        std::sort(key.begin(), key.end());
                        if (!seen.insert(key).second) continue;
                        if (static_cast<long long>(seen.size()) > bounds.max_states_per_node)
                            throw LoadError("oracle bounds exceeded: too many derivable states");
                        stack.push_back(next);
                    }
                }
                states.push_back(std::move(cur));
            }
        }

        for (const auto& derived : states) {
            std::uint32_t done2 = done | derived.mask | attach_mask;
            double state_cost = call_state_cost(sm.ctx(), sm.state_value(derived.state));
            if (done2 == full) {
                push(e.key, e.cost + state_cost, true);
                continue;
            }
            std::vector<Value> options;
            std::vector<double> option_costs;
            sm.transitions_with_costs(derived.state, options, option_costs);
            if (static_cast<int>(options.size()) - 1 > bounds.max_transitions)
                throw LoadError("oracle bounds exceeded: transition fan-out " +
                                std::to_string(options.size() - 1) + " > " +
                                std::to_string(bounds.max_transitions));
            for (std::size_t ti = 0; ti < options.size(); ++ti) {
                Value new_map;
                try {
                    new_map = call_apply(sm.ctx(), options[ti], map);
                } catch (const EvalError&) {
                    continue;
                }
                bool ok = true;
                for (int l : new_map.as_qubit_map().locs)
                    if (!sm.loc_allowed(l)) ok = false;
                if (!ok) continue;
                double w = state_cost + option_costs[ti];
                push({new_map.as_qubit_map().locs, done2}, e.cost + w, false);
            }
        }
    }
    throw LoadError("oracle: no solution exists within Locs");
}

}  // namespace marol
