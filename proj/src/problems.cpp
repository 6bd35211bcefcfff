#include "problems.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "diagnostics.hpp"

namespace marol {

namespace {

const char* kNisqmrSource =
    R"MAROL(RouteInfo:
  GateRealization{edge : (Loc,Loc)}
  routed_gates = [CX]
  realize_gate = map(|x| -> GateRealization{edge = x},
                   Arch.edges_between(State.map[Gate.qubits[0]], State.map[Gate.qubits[1]]))

TransitionInfo:
  Transition{edge : (Loc,Loc)}
  get_transitions = map(|x| -> Transition{edge = x}, Arch.edges())
  apply = value_swap(QubitMap, Trans.edge.(0), Trans.edge.(1))
  cost = if Trans == IdTrans
         then 0.0
         else 1.0
)MAROL";

const char* kNisqVeSource =
    R"MAROL(// Variable-error NISQ routing: per-edge error rates enter both the swap cost
// and a per-state cost over the executed gates. Costs are -log(p_success),
// so the total cost of a solution is -log of its success probability.
RouteInfo:
  GateRealization{edge : (Loc,Loc)}
  routed_gates = [CX]
  realize_gate = map(|x| -> GateRealization{edge = x},
                   Arch.edges_between(State.map[Gate.qubits[0]], State.map[Gate.qubits[1]]))

TransitionInfo:
  Transition{edge : (Loc,Loc)}
  get_transitions = map(|x| -> Transition{edge = x}, Arch.edges())
  apply = value_swap(QubitMap, Trans.edge.(0), Trans.edge.(1))
  cost = if Trans == IdTrans
         then 0.0
         else Arch.edge_cost[Trans.edge.(0)][Trans.edge.(1)]

ArchInfo:
  Arch{edge_cost : List[List[Float]]}

StateInfo:
  cost = fold(0,
              |acc,x| -> acc+x,
              map(|x| -> Arch.edge_cost[State.map[x.qubits[0]]][State.map[x.qubits[1]]],
                  State.route))
)MAROL";

const char* kScmrSource =
    R"MAROL(// Surface-code mapping and routing. CX gates realize as lattice-surgery paths
// from a vertical neighbor of the control's cell to a horizontal neighbor of
// the target's cell; T gates route to a horizontal neighbor of a magic-state
// cell. Paths within one state must be vertex-disjoint, the qubit map is
// fixed (identity transitions only), and each state costs 1.
RouteInfo:
  GateRealization{path : List[Loc]}
  routed_gates = [CX, T]
  realize_gate =
    if Instr.gate_type == "cx"
    then map(|p| -> GateRealization{path = p},
             all_paths(Arch,
                       vertical_neighbors(State.map[Instr.qubits[0]], Arch.width, Arch.height),
                       horizontal_neighbors(State.map[Instr.qubits[1]], Arch.width),
                       fold([], |acc,g| -> concat(acc, g.path), State.route)))
    else map(|p| -> GateRealization{path = p},
             all_paths(Arch,
                       vertical_neighbors(State.map[Instr.qubits[0]], Arch.width, Arch.height),
                       fold([], |acc,m| -> concat(acc, horizontal_neighbors(m, Arch.width)),
                            Arch.magic_state),
                       fold([], |acc,g| -> concat(acc, g.path), State.route)))

TransitionInfo:
  Transition{}
  get_transitions = []
  apply = QubitMap
  cost = 0.0

ArchInfo:
  Arch{width : Int, height : Int, magic_state : List[Loc], map_location : List[Loc]}
  get_locations = Arch.map_location

StateInfo:
  cost = 1.0
)MAROL";

} // namespace

const std::vector<ProblemBundle>& builtin_problems() {
    static const std::vector<ProblemBundle> bundles = {
        {"nisqmr", kNisqmrSource,
         "NISQ mapping and routing: CX gates need adjacent locations; swaps along "
         "arch edges change the map at unit cost.",
         true},
        {"nisq_ve", kNisqVeSource,
         "Variable-error NISQ: swap and gate costs are -log(1 - p) for the edge's "
         "error rate p, so total cost is -log of the success probability. The "
         "RouteInfo/TransitionInfo structure matches nisqmr; edge_cost comes from "
         "the arch file (see gen_ve_errors).",
         true},
        {"scmr", kScmrSource,
         "Surface-code mapping and routing on a grid of logical qubits: gates "
         "realize as vertex-disjoint lattice-surgery paths, the map is fixed, and "
         "the cost is the number of states.",
         false},
    };
    return bundles;
}

const ProblemBundle& builtin_problem(const std::string& name) {
    for (const auto& b : builtin_problems())
        if (b.name == name) return b;
    throw LoadError("unknown built-in problem '" + name + "' (have: nisqmr, nisq_ve, scmr)");
}

namespace {

using nlohmann::ordered_json;

ordered_json grid_arch(int width, int height) {
    ordered_json out;
    out["n"] = width * height;
    ordered_json edges = ordered_json::array();
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            int v = r * width + c;
            if (c + 1 < width) edges.push_back({v, v + 1});
            if (r + 1 < height) edges.push_back({v, v + width});
        }
    out["edges"] = std::move(edges);
    out["vertex_labels"] = ordered_json::object();
    out["fields"] = ordered_json::object();
    out["fields"]["width"] = width;
    out["fields"]["height"] = height;
    return out;
}

} // namespace

std::string gen_arch(const std::string& kind, int p1, int p2) {
    if (kind == "line") {
        if (p1 < 0) throw LoadError("gen_arch line: negative length");
        ordered_json out = grid_arch(p1, p1 > 0 ? 1 : 0);
        out["fields"]["magic_state"] = ordered_json::array();
        ordered_json all = ordered_json::array();
        for (int i = 0; i < p1; ++i) all.push_back(i);
        out["fields"]["map_location"] = std::move(all);
        return out.dump(2) + "\n";
    }
    if (kind == "grid") {
        if (p1 <= 0 || p2 <= 0) throw LoadError("gen_arch grid: dimensions must be positive");
        ordered_json out = grid_arch(p1, p2);
        out["fields"]["magic_state"] = ordered_json::array();
        ordered_json all = ordered_json::array();
        for (int i = 0; i < p1 * p2; ++i) all.push_back(i);
        out["fields"]["map_location"] = std::move(all);
        return out.dump(2) + "\n";
    }
    if (kind == "compact_magic_column") {
        if (p1 <= 0 || p2 <= 0)
            throw LoadError("gen_arch compact_magic_column: dimensions must be positive");
        int width = p1 + 1, height = p2;
        ordered_json out = grid_arch(width, height);
        ordered_json magic = ordered_json::array();
        ordered_json maploc = ordered_json::array();
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                int v = r * width + c;
                if (c == width - 1)
                    magic.push_back(v);
                else
                    maploc.push_back(v);
            }
        out["fields"]["magic_state"] = std::move(magic);
        out["fields"]["map_location"] = std::move(maploc);
        return out.dump(2) + "\n";
    }
    if (kind == "compact") {
        if (p1 <= 0) throw LoadError("gen_arch compact: capacity must be positive");
        int top = (p1 + 1) / 2;
        int bottom = p1 - top;
        int width = top + 2, height = 5;
        ordered_json out = grid_arch(width, height);
        ordered_json magic = ordered_json::array();
        ordered_json maploc = ordered_json::array();
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                int v = r * width + c;
                bool perimeter = r == 0 || r == height - 1 || c == 0 || c == width - 1;
                if (perimeter) {
                    magic.push_back(v);
                } else if (r == 1 && c - 1 < top) {
                    maploc.push_back(v);
                } else if (r == 3 && c - 1 < bottom) {
                    maploc.push_back(v);
                }
            }
        out["fields"]["magic_state"] = std::move(magic);
        out["fields"]["map_location"] = std::move(maploc);
        return out.dump(2) + "\n";
    }
    throw LoadError("gen_arch: unknown kind '" + kind +
                    "' (have: line, grid, compact, compact_magic_column)");
}

std::string gen_ve_errors(const std::string& arch_json, std::uint64_t seed) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(arch_json);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError({}, std::string("arch: ") + err.what());
    }
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw LoadError("gen_ve_errors: missing 'n'");
    int n = j["n"].get<int>();

    std::mt19937_64 engine(seed);
    auto unit = [&]() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

    std::vector<std::vector<double>> cost(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::vector<std::vector<double>> rate = cost;
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            int u = e[0].get<int>(), v = e[1].get<int>();
            double p = 1e-3 + unit() * (1e-1 - 1e-3);
            double c = -std::log1p(-p);
            cost[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = c;
            cost[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = c;
            rate[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = p;
            rate[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = p;
        }
    }
    if (!j.contains("fields") || !j["fields"].is_object())
        j["fields"] = nlohmann::ordered_json::object();
    j["fields"]["edge_cost"] = cost;
    j["fields"]["edge_error_rate"] = rate;
    return j.dump(2) + "\n";
}

}  // namespace marol
