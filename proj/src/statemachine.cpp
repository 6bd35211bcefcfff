#include "statemachine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "diagnostics.hpp"
#include "value_json.hpp"

namespace marol {

namespace {
constexpr double kCostTolerance = 1e-9;

Value instr_value_with_realization(const Instruction& ins, const Value& realization) {
    auto data = std::make_shared<InstrData>();
    data->instr = &ins;
    data->realization = std::make_shared<const Value>(realization);
    return Value::instr(std::move(data));
}
} // namespace

double solution_cost(const Solution& sol) {
    double total = 0.0;
    for (const auto& s : sol.steps) total += s.transition_cost + s.state_cost;
    return total;
}

StateMachine::StateMachine(const MarolProgram* program, LoadedArch arch, PathBounds bounds)
    : program_(program), arch_(std::move(arch)) {
    ctx_.program = program_;
    ctx_.arch = arch_.data;
    ctx_.bounds = bounds;
    locs_ = call_get_locations(ctx_);
    loc_allowed_.assign(static_cast<std::size_t>(arch_.graph->n()), false);
    for (int l : locs_) loc_allowed_[static_cast<std::size_t>(l)] = true;
    noninterfering_ = analyze_noninterference(*program_);

    transitions_cacheable_ = !expr_mentions_var(*program_->get_transitions, "State");
    if (transitions_cacheable_) {
        QubitMapData empty;
        empty.qubit_ids = std::make_shared<const std::vector<int>>();
        Value state = make_state_value(Value::qubit_map(std::move(empty)), {});
        cached_transitions_ = call_get_transitions(ctx_, state);
        for (const auto& t : cached_transitions_)
            cached_costs_.push_back(call_cost(ctx_, t));
    }
}

void StateMachine::transitions_with_costs(const DeviceState& s, std::vector<Value>& trans,
                                          std::vector<double>& costs) const {
    if (transitions_cacheable_) {
        trans = cached_transitions_;
        costs = cached_costs_;
        return;
    }
    trans = call_get_transitions(ctx_, state_value(s));
    costs.clear();
    for (const auto& t : trans) costs.push_back(call_cost(ctx_, t));
}

bool StateMachine::loc_allowed(int l) const {
    return l >= 0 && l < static_cast<int>(loc_allowed_.size()) &&
           loc_allowed_[static_cast<std::size_t>(l)];
}

Value StateMachine::make_instr_value(const Instruction& ins) const {
    auto data = std::make_shared<InstrData>();
    data->instr = &ins;
    return Value::instr(std::move(data));
}

Value StateMachine::state_value(const DeviceState& s) const {
    std::vector<Value> route;
    route.reserve(s.routes.size());
    for (const auto& r : s.routes)
        route.push_back(instr_value_with_realization(*r.instr, r.realization));
    return make_state_value(s.map, std::move(route));
}

std::vector<Value> StateMachine::realize(const DeviceState& state, const Instruction& ins) const {
    return call_realize_gate(ctx_, state_value(state), make_instr_value(ins));
}

bool StateMachine::is_real(const DeviceState& s, std::string* why) const {
    auto explain = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    // RealEmpty: the map must stay within Locs (and be injective).
    const QubitMapData& m = s.map.as_qubit_map();
    std::vector<int> range = m.locs;
    std::sort(range.begin(), range.end());
    if (std::adjacent_find(range.begin(), range.end()) != range.end())
        return explain("qubit map is not injective");
    for (int l : range)
        if (!loc_allowed(l))
            return explain("qubit mapped outside Locs: location " + std::to_string(l));

    std::set<int> seen;
    for (const auto& r : s.routes) {
        if (!program_->routes_gate(r.instr->gate))
            return explain("instruction " + std::to_string(r.instr->index) + " ('" +
                           r.instr->gate + "') is not a routed gate type");
        if (!seen.insert(r.instr->index).second)
            return explain("instruction " + std::to_string(r.instr->index) +
                           " routed more than once");
    }

    // RealIns: replay the recorded insertion order, checking membership of
    // each realization in the candidates of the partial state built so far.
    DeviceState partial;
    partial.map = s.map;
    for (const auto& r : s.routes) {
        std::vector<Value> candidates = realize(partial, *r.instr);
        bool found = false;
        for (const auto& c : candidates)
            if (values_equal(c, r.realization)) {
                found = true;
                break;
            }
        if (!found)
            return explain("instruction " + std::to_string(r.instr->index) +
                           ": recorded realization is not derivable");
        partial.routes.push_back(r);
    }
    return true;
}

std::pair<Value, double> StateMachine::step(const DeviceState& s, const Value& trans) const {
    return {call_apply(ctx_, trans, s.map), call_cost(ctx_, trans)};
}

std::vector<Violation> StateMachine::validate_solution(const Circuit& circuit,
                                                       const Solution& sol) const {
    std::vector<Violation> out;
    const auto& steps = sol.steps;

    // (a) every state is realizable
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::string why;
        if (!is_real(steps[i].state, &why))
            out.push_back({static_cast<int>(i), "real", why});
    }

    // (b) every instruction in exactly one step
    std::map<int, int> step_of; // instruction index -> step
    for (std::size_t i = 0; i < steps.size(); ++i) {
        auto place = [&](int instr) {
            auto [it, fresh] = step_of.emplace(instr, static_cast<int>(i));
            if (!fresh)
                out.push_back({static_cast<int>(i), "coverage",
                               "instruction " + std::to_string(instr) + " appears in steps " +
                                   std::to_string(it->second) + " and " + std::to_string(i)});
        };
        for (const auto& r : steps[i].state.routes) place(r.instr->index);
        for (int idx : steps[i].nonrouted) place(idx);
    }
    for (const auto& ins : circuit.instructions()) {
        if (!step_of.count(ins.index))
            out.push_back({-1, "coverage", "instruction missing: " + std::to_string(ins.index) +
                                               " ('" + ins.gate + "')"});
        if (!program_->routes_gate(ins.gate)) {
            for (std::size_t i = 0; i < steps.size(); ++i)
                if (steps[i].state.routes_instr(ins.index))
                    out.push_back({static_cast<int>(i), "coverage",
                                   "non-routed instruction " + std::to_string(ins.index) +
                                       " appears in a gate route"});
        }
    }
    for (const auto& [instr, step] : step_of) {
        if (instr < 0 || instr >= static_cast<int>(circuit.size()))
            out.push_back({step, "coverage",
                           "unknown instruction index " + std::to_string(instr)});
    }

    // (c) dependency order across steps; instructions within a step form a
    // layer (no dependencies). Direct predecessors suffice by transitivity.
    for (const auto& ins : circuit.instructions()) {
        auto it = step_of.find(ins.index);
        if (it == step_of.end()) continue;
        for (int p : circuit.direct_preds(ins.index)) {
            auto pit = step_of.find(p);
            if (pit == step_of.end()) continue;
            if (pit->second > it->second)
                out.push_back({it->second, "dependency",
                               "instruction " + std::to_string(ins.index) +
                                   " scheduled before its dependency " + std::to_string(p)});
            else if (pit->second == it->second)
                out.push_back({it->second, "layer",
                               "instructions " + std::to_string(p) + " and " +
                                   std::to_string(ins.index) +
                                   " are dependent but share a step"});
        }
    }

    // (d) consecutive states related by a program transition at the recorded
    // cost; the final step carries the identity with zero cost.
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& cur = steps[i];
        if (i + 1 == steps.size()) {
            if (!cur.transition.is_id_trans() || cur.transition_cost != 0.0)
                out.push_back({static_cast<int>(i), "transition",
                               "final step must carry the identity transition at zero cost"});
            break;
        }
        try {
            if (!cur.transition.is_id_trans()) {
                std::vector<Value> options = call_get_transitions(ctx_, state_value(cur.state));
                bool member = false;
                for (const auto& t : options)
                    if (values_equal(t, cur.transition)) {
                        member = true;
                        break;
                    }
                if (!member) {
                    out.push_back({static_cast<int>(i), "transition",
                                   "recorded transition is not offered by get_transitions"});
                    continue;
                }
            }
            Value next_map = call_apply(ctx_, cur.transition, cur.state.map);
            if (!values_equal(next_map, steps[i + 1].state.map))
                out.push_back({static_cast<int>(i), "transition",
                               "next state's qubit map does not match apply(transition)"});
            double c = call_cost(ctx_, cur.transition);
            if (std::fabs(c - cur.transition_cost) > kCostTolerance)
                out.push_back({static_cast<int>(i), "cost",
                               "cost mismatch: recorded transition cost " +
                                   std::to_string(cur.transition_cost) + ", program gives " +
                                   std::to_string(c)});
        } catch (const EvalError& err) {
            out.push_back({static_cast<int>(i), "transition", err.what()});
        }
    }

    // (e) recorded costs: per-state cost and the total
    double total = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        try {
            double sc = call_state_cost(ctx_, state_value(steps[i].state));
            if (std::fabs(sc - steps[i].state_cost) > kCostTolerance)
                out.push_back({static_cast<int>(i), "cost",
                               "cost mismatch: recorded state cost " +
                                   std::to_string(steps[i].state_cost) + ", program gives " +
                                   std::to_string(sc)});
        } catch (const EvalError& err) {
            out.push_back({static_cast<int>(i), "cost", err.what()});
        }
        total += steps[i].transition_cost + steps[i].state_cost;
    }
    if (std::fabs(total - sol.total_cost) > kCostTolerance)
        out.push_back({-1, "cost", "cost mismatch: total " + std::to_string(sol.total_cost) +
                                       " != sum of step costs " + std::to_string(total)});
    return out;
}

Value make_qubit_map(const Circuit& circuit, const std::vector<int>& locs) {
    QubitMapData data;
    data.qubit_ids = std::make_shared<const std::vector<int>>(circuit.qubits());
    data.locs = locs;
    if (data.locs.size() != data.qubit_ids->size())
        throw EvalError("qubit map: wrong number of locations");
    std::vector<int> sorted = data.locs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw EvalError("qubit map: not injective");
    return Value::qubit_map(std::move(data));
}

std::string solution_to_json(const Solution& sol) {
    using nlohmann::ordered_json;
    ordered_json out;
    out["steps"] = ordered_json::array();
    for (const auto& step : sol.steps) {
        ordered_json js;
        ordered_json map = ordered_json::object();
        const QubitMapData& m = step.state.map.as_qubit_map();
        for (std::size_t i = 0; i < m.qubit_ids->size(); ++i)
            map[std::to_string((*m.qubit_ids)[i])] = m.locs[i];
        js["map"] = std::move(map);
        js["routes"] = ordered_json::array();
        for (std::size_t k = 0; k < step.state.routes.size(); ++k) {
            const auto& r = step.state.routes[k];
            ordered_json jr;
            jr["instr"] = r.instr->index;
            jr["realization"] = encode_value(r.realization);
            jr["order"] = k;
            js["routes"].push_back(std::move(jr));
        }
        js["nonrouted"] = step.nonrouted;
        js["transition"] = encode_value(step.transition);
        js["transition_cost"] = step.transition_cost;
        js["state_cost"] = step.state_cost;
        out["steps"].push_back(std::move(js));
    }
    out["total_cost"] = sol.total_cost;
    return out.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text, const MarolProgram& program,
                            const Circuit& circuit) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError({}, std::string("solution: ") + err.what());
    }
    if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array())
        throw LoadError("solution: missing 'steps' array");

    const Type realization_type = Type::strct("GateRealization");
    const Type transition_type = Type::strct("Transition");

    Solution sol;
    for (const auto& js : j["steps"]) {
        SolutionStep step;
        if (!js.contains("map") || !js["map"].is_object())
            throw LoadError("solution: step missing 'map' object");
        std::map<int, int> qubit_to_loc;
        for (auto it = js["map"].begin(); it != js["map"].end(); ++it) {
            int q;
            try {
                q = std::stoi(it.key());
            } catch (const std::exception&) {
                throw LoadError("solution: bad qubit id '" + it.key() + "'");
            }
            if (!it.value().is_number_integer())
                throw LoadError("solution: map values must be locations");
            qubit_to_loc[q] = it.value().get<int>();
        }
        std::vector<int> locs;
        for (int q : circuit.qubits()) {
            auto it = qubit_to_loc.find(q);
            if (it == qubit_to_loc.end())
                throw LoadError("solution: map missing qubit " + std::to_string(q));
            locs.push_back(it->second);
        }
        step.state.map = make_qubit_map(circuit, locs);

        if (js.contains("routes")) {
            std::vector<std::pair<long long, RouteEntry>> entries;
            for (const auto& jr : js["routes"]) {
                if (!jr.contains("instr") || !jr["instr"].is_number_integer())
                    throw LoadError("solution: route missing 'instr'");
                int idx = jr["instr"].get<int>();
                if (idx < 0 || idx >= static_cast<int>(circuit.size()))
                    throw LoadError("solution: route instruction index out of range");
                RouteEntry entry;
                entry.instr = &circuit.instructions()[static_cast<std::size_t>(idx)];
                entry.realization = decode_value(jr.at("realization"), realization_type, program,
                                                 "solution realization");
                long long order = jr.contains("order") ? jr["order"].get<long long>()
                                                       : static_cast<long long>(entries.size());
                entries.emplace_back(order, std::move(entry));
            }
            std::stable_sort(entries.begin(), entries.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (auto& [order, entry] : entries) step.state.routes.push_back(std::move(entry));
        }
        if (js.contains("nonrouted"))
            for (const auto& v : js["nonrouted"]) step.nonrouted.push_back(v.get<int>());
        step.transition =
            decode_value(js.at("transition"), transition_type, program, "solution transition");
        step.transition_cost = js.value("transition_cost", 0.0);
        step.state_cost = js.value("state_cost", 0.0);
        sol.steps.push_back(std::move(step));
    }
    sol.total_cost = j.value("total_cost", 0.0);
    return sol;
}

}  // namespace marol
