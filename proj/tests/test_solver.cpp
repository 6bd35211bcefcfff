#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "diagnostics.hpp"
#include "oracle.hpp"
#include "parser.hpp"
#include "problems.hpp"
#include "solver.hpp"
#include "statemachine.hpp"
#include "test_util.hpp"
#include "typecheck.hpp"

using namespace marol;

namespace {

struct Instance {
    MarolProgram program;
    LoadedArch arch;
    Circuit circuit;
    std::unique_ptr<StateMachine> sm;

    Instance(const std::string& source, const std::string& arch_json,
             const std::string& circuit_text) {
        program = parse_program(source);
        typecheck(program);
        arch = parse_arch(arch_json, program);
        circuit = parse_circuit(circuit_text);
        sm = std::make_unique<StateMachine>(&program, arch);
    }
};

Deadline far_deadline() { return {Clock::now() + std::chrono::hours(1), nullptr}; }

std::vector<const Instruction*> layer_of(const Circuit& c, std::initializer_list<int> idx) {
    std::vector<const Instruction*> out;
    for (int i : idx) out.push_back(&c.instructions()[static_cast<std::size_t>(i)]);
    return out;
}

std::set<int> route_domain(const DeviceState& s) {
    std::set<int> out;
    for (const auto& r : s.routes) out.insert(r.instr->index);
    return out;
}

// Exhaustive (non-induced) monomorphism check, used as the warm-start oracle.
bool embeds(const std::vector<std::pair<int, int>>& pattern_edges, int pattern_n,
            const ArchGraph& g) {
    std::vector<int> assign(static_cast<std::size_t>(pattern_n), -1);
    std::vector<bool> used(static_cast<std::size_t>(g.n()), false);
    auto rec = [&](auto&& self, int v) -> bool {
        if (v == pattern_n) return true;
        for (int loc = 0; loc < g.n(); ++loc) {
            if (used[static_cast<std::size_t>(loc)]) continue;
            bool ok = true;
            for (auto [a, b] : pattern_edges) {
                int other = -1;
                if (a == v && assign[static_cast<std::size_t>(b)] >= 0)
                    other = assign[static_cast<std::size_t>(b)];
                if (b == v && assign[static_cast<std::size_t>(a)] >= 0)
                    other = assign[static_cast<std::size_t>(a)];
                if (other >= 0 && !g.has_edge(loc, other)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            assign[static_cast<std::size_t>(v)] = loc;
            used[static_cast<std::size_t>(loc)] = true;
            if (self(self, v + 1)) return true;
            assign[static_cast<std::size_t>(v)] = -1;
            used[static_cast<std::size_t>(loc)] = false;
        }
        return false;
    };
    return rec(rec, 0);
}

} // namespace

TEST_CASE("annealing mechanics") {
    CHECK(sa_step_count({10.0, 1e-3, 1e-5}) == 13809);
    CHECK(sa_step_count({10.0, 1.0, 1e-5}) == 1);
    CHECK(sa_acceptance_probability(1.0, 10.0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-13));
    CHECK(sa_acceptance_probability(-2.0, 10.0) == 1.0);
    CHECK(sa_acceptance_probability(0.0, 10.0) == 1.0);
}

TEST_CASE("route_one_pass on the worked example") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                  fig2_circuit_text());
    SolverConfig cfg;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    Rng rng(1, 0);
    Value identity = make_qubit_map(inst.circuit, {0, 1, 2, 3});

    SUBCASE("front layer routes both gates") {
        DeviceState s = solver.route_one_pass(layer_of(inst.circuit, {0, 1}), identity, rng);
        CHECK(route_domain(s) == std::set<int>{0, 1});
        CHECK(inst.sm->is_real(s));
    }
    SUBCASE("second layer routes nothing under the identity map") {
        DeviceState s = solver.route_one_pass(layer_of(inst.circuit, {2, 3}), identity, rng);
        CHECK(s.routes.empty());
    }
    SUBCASE("empty layer gives an empty state") {
        DeviceState s = solver.route_one_pass({}, identity, rng);
        CHECK(s.routes.empty());
        CHECK(inst.sm->is_real(s));
    }
}

TEST_CASE("objective weighs routed gates by criticality") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                  fig2_circuit_text());
    SolverConfig weighted;
    Solver solver(inst.sm.get(), &inst.circuit, weighted);
    Rng rng(1, 0);
    Value identity = make_qubit_map(inst.circuit, {0, 1, 2, 3});
    DeviceState s = solver.route_one_pass(layer_of(inst.circuit, {0, 1}), identity, rng);
    REQUIRE(s.routes.size() == 2);
    CHECK(solver.objective(s) == 6.0); // criticality 2 for both front gates

    SolverConfig plain;
    plain.criticality_weighting = false;
    Solver unweighted(inst.sm.get(), &inst.circuit, plain);
    CHECK(unweighted.objective(s) == 2.0);
    DeviceState empty;
    empty.map = identity;
    CHECK(solver.objective(empty) == 0.0);
}

TEST_CASE("non-interference makes the maximal state order-independent") {
    std::mt19937_64 seeds(3);
    Instance inst(builtin_problem("nisqmr").source, gen_arch("grid", 3, 3),
                  "cx 0 1\ncx 2 3\ncx 4 5\ncx 6 7\ncx 1 8\ncx 0 2\n");
    SolverConfig cfg;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    Rng rng(7, 0);

    // a random injective map over the nine locations
    std::vector<int> pool = inst.sm->locs();
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[seeds() % i]);
    pool.resize(static_cast<std::size_t>(inst.circuit.qubit_count()));
    Value map = make_qubit_map(inst.circuit, pool);

    std::vector<const Instruction*> layer = layer_of(inst.circuit, {0, 1, 2, 3});
    std::set<int> reference = route_domain(solver.route_one_pass(layer, map, rng));
    for (int round = 0; round < 100; ++round) {
        std::vector<const Instruction*> perm = layer;
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[seeds() % i]);
        CHECK(route_domain(solver.route_one_pass(perm, map, rng)) == reference);
    }
}

TEST_CASE("maximal-state search on interfering programs explores orders") {
    Instance inst(builtin_problem("scmr").source, gen_arch("grid", 3, 3), "cx 0 1\ncx 2 3\n");
    SolverConfig cfg;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    Rng rng(5, 0);

    SUBCASE("the serializing map routes exactly one gate in any order") {
        Value bad = make_qubit_map(inst.circuit, {0, 6, 2, 8});
        DeviceState s =
            solver.max_state_search(layer_of(inst.circuit, {0, 1}), bad, rng, far_deadline());
        CHECK(s.routes.size() == 1);
    }
    SUBCASE("the parallel map routes both gates") {
        Value good = make_qubit_map(inst.circuit, {0, 4, 1, 5});
        DeviceState s =
            solver.max_state_search(layer_of(inst.circuit, {0, 1}), good, rng, far_deadline());
        CHECK(s.routes.size() == 2);
        CHECK(inst.sm->is_real(s));
    }
}

TEST_CASE("maxstate_run reproduces the worked two-state solution") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                  fig2_circuit_text());
    SolverConfig cfg;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    Rng rng(11, 0);
    auto sol = solver.maxstate_run(make_qubit_map(inst.circuit, {0, 1, 2, 3}), rng,
                                   far_deadline());
    REQUIRE(sol.has_value());
    CHECK(sol->total_cost == 1.0);
    REQUIRE(sol->steps.size() == 2);
    CHECK(route_domain(sol->steps[0].state) == std::set<int>{0, 1});
    CHECK(route_domain(sol->steps[1].state) == std::set<int>{2, 3});
    // the transition between them is the middle swap
    const StructData& t = sol->steps[0].transition.as_struct();
    CHECK(values_equal(*t.field("edge"), Value::pair(Value::loc(1), Value::loc(2))));
    CHECK(inst.sm->validate_solution(inst.circuit, *sol).empty());
}

TEST_CASE("maxstate_run edge cases") {
    SUBCASE("empty circuit gives the empty solution") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), "");
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        Rng rng(1, 0);
        auto sol = solver.maxstate_run(make_qubit_map(inst.circuit, {}), rng, far_deadline());
        REQUIRE(sol.has_value());
        CHECK(sol->steps.empty());
        CHECK(sol->total_cost == 0.0);
    }
    SUBCASE("expired deadline discards the run") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                      fig2_circuit_text());
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        Rng rng(1, 0);
        Deadline past{Clock::now() - std::chrono::seconds(1), nullptr};
        CHECK_FALSE(
            solver.maxstate_run(make_qubit_map(inst.circuit, {0, 1, 2, 3}), rng, past));
    }
    SUBCASE("unsatisfiable fixed-map instance aborts instead of spinning") {
        // two distant corners on a grid with identity transitions only
        Instance inst(builtin_problem("scmr").source, gen_arch("grid", 1, 3), "cx 0 1\n");
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        Rng rng(1, 0);
        // width-1 grid has no horizontal neighbors, so nothing ever routes
        auto sol = solver.maxstate_run(make_qubit_map(inst.circuit, {0, 2}), rng,
                                       far_deadline());
        CHECK_FALSE(sol.has_value());
    }
    SUBCASE("trailing single-qubit gates attach to a final state") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                      "cx 0 1\nh 1\nh 0\n");
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        Rng rng(1, 0);
        auto sol = solver.maxstate_run(make_qubit_map(inst.circuit, {0, 1}), rng,
                                       far_deadline());
        REQUIRE(sol.has_value());
        CHECK(sol->total_cost == 0.0);
        REQUIRE(sol->steps.size() == 2);
        CHECK(sol->steps[0].nonrouted.empty());
        CHECK(sol->steps[1].nonrouted == std::vector<int>{1, 2});
        CHECK(sol->steps[0].transition.is_id_trans()); // free progress, no swap
        CHECK(inst.sm->validate_solution(inst.circuit, *sol).empty());
    }
}

TEST_CASE("multi-qubit gates outside routed_gates are rejected up front") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), "cz 0 1\n");
    SolverConfig cfg;
    CHECK_THROWS_AS(Solver(inst.sm.get(), &inst.circuit, cfg), LoadError);
}

TEST_CASE("more qubits than locations is unsatisfiable") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 2, 0),
                  "cx 0 1\ncx 1 2\n");
    SolverConfig cfg;
    CHECK_THROWS_AS(Solver(inst.sm.get(), &inst.circuit, cfg), LoadError);
}

TEST_CASE("incremental isomorphism warm start") {
    SUBCASE("a line interaction graph embeds fully into the line") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                      "cx 0 1\ncx 1 2\ncx 2 3\n");
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        std::vector<int> map = solver.incremental_isomorphism();
        REQUIRE(map.size() == 4);
        // every interaction edge lands on an arch edge
        CHECK(inst.sm->graph().has_edge(map[0], map[1]));
        CHECK(inst.sm->graph().has_edge(map[1], map[2]));
        CHECK(inst.sm->graph().has_edge(map[2], map[3]));
    }
    SUBCASE("the cycle-closing edge stops the embedding") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                      fig2_circuit_text());
        // the four-cycle does not embed into the path (exhaustive check)
        CHECK_FALSE(embeds({{0, 1}, {2, 3}, {1, 3}, {0, 2}}, 4, inst.sm->graph()));
        CHECK(embeds({{0, 1}, {2, 3}, {1, 3}}, 4, inst.sm->graph()));
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        std::vector<int> map = solver.incremental_isomorphism();
        REQUIRE(map.size() == 4);
        // the first three interaction edges are preserved
        CHECK(inst.sm->graph().has_edge(map[0], map[1]));
        CHECK(inst.sm->graph().has_edge(map[2], map[3]));
        CHECK(inst.sm->graph().has_edge(map[1], map[3]));
    }
    SUBCASE("single gate lands on an adjacent pair") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), "cx 0 1\n");
        SolverConfig cfg;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        std::vector<int> map = solver.incremental_isomorphism();
        REQUIRE(map.size() == 2);
        CHECK(inst.sm->graph().has_edge(map[0], map[1]));
    }
}

TEST_CASE("oracle on worked instances") {
    SUBCASE("the four-gate example needs exactly one swap") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                      fig2_circuit_text());
        CHECK(brute_force_oracle(*inst.sm, inst.circuit) == 1.0);
    }
    SUBCASE("an embeddable interaction graph needs none") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 3, 0),
                      "cx 0 1\ncx 1 2\n");
        CHECK(brute_force_oracle(*inst.sm, inst.circuit) == 0.0);
    }
    SUBCASE("the triangle on a three-line needs one swap") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 3, 0),
                      "cx 0 1\ncx 1 2\ncx 0 2\n");
        CHECK(brute_force_oracle(*inst.sm, inst.circuit) == 1.0);
    }
    SUBCASE("empty circuit costs nothing") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 3, 0), "");
        CHECK(brute_force_oracle(*inst.sm, inst.circuit) == 0.0);
    }
    SUBCASE("bounds are enforced") {
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 6, 0),
                      "cx 0 1\ncx 2 3\ncx 4 0\n");
        OracleBounds bounds; // max_locs = 5 < 6
        CHECK_THROWS_AS(brute_force_oracle(*inst.sm, inst.circuit, bounds), LoadError);
    }
    SUBCASE("scmr one-state instances cost one state") {
        Instance inst(builtin_problem("scmr").source, gen_arch("grid", 2, 2), "cx 0 1\n");
        OracleBounds bounds;
        bounds.max_locs = 4;
        CHECK(brute_force_oracle(*inst.sm, inst.circuit, bounds) == 1.0);
    }
}

TEST_CASE("solve finds the optimum on the worked example for several seeds") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                  fig2_circuit_text());
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SolverConfig cfg;
        cfg.seed = seed;
        cfg.timeout_seconds = 10.0;
        cfg.jobs = 1;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        SolveResult result = solver.solve();
        REQUIRE(result.found);
        CHECK(result.best_cost == 1.0);
        CHECK(inst.sm->validate_solution(inst.circuit, result.best).empty());
    }
}

TEST_CASE("solve is deterministic for a fixed seed with one worker") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("grid", 2, 3),
                  "cx 0 1\ncx 2 3\ncx 1 2\ncx 0 3\n");
    auto run = [&](int jobs) {
        SolverConfig cfg;
        cfg.seed = 77;
        cfg.jobs = jobs;
        cfg.timeout_seconds = 20.0;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        return solver.solve();
    };
    SolveResult a = run(1);
    SolveResult b = run(1);
    REQUIRE(a.found);
    REQUIRE(b.found);
    CHECK(solution_to_json(a.best) == solution_to_json(b.best));

    // worker 0's trajectory is independent of the worker count
    SolveResult c = run(3);
    REQUIRE(c.found);
    REQUIRE(a.workers.size() == 1);
    REQUIRE(c.workers.size() == 3);
    CHECK(a.workers[0].found == c.workers[0].found);
    CHECK(a.workers[0].best_cost == c.workers[0].best_cost);
    CHECK(a.workers[0].runs == c.workers[0].runs);
}

TEST_CASE("timeout zero yields no solution") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0),
                  fig2_circuit_text());
    SolverConfig cfg;
    cfg.timeout_seconds = 0.0;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    SolveResult result = solver.solve();
    CHECK_FALSE(result.found);
}

TEST_CASE("fixed-map mode") {
    SUBCASE("the serializing surface-code map yields exactly two states") {
        Instance inst(builtin_problem("scmr").source, gen_arch("grid", 3, 3),
                      "cx 0 1\ncx 2 3\n");
        SolverConfig cfg;
        cfg.fixed_map = std::vector<int>{0, 6, 2, 8};
        cfg.timeout_seconds = 30.0;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        SolveResult result = solver.solve();
        REQUIRE(result.found);
        CHECK(result.best.steps.size() == 2);
        CHECK(result.best_cost == 2.0);
    }
    SUBCASE("the parallel map yields one state") {
        Instance inst(builtin_problem("scmr").source, gen_arch("grid", 3, 3),
                      "cx 0 1\ncx 2 3\n");
        SolverConfig cfg;
        cfg.fixed_map = std::vector<int>{0, 4, 1, 5};
        cfg.timeout_seconds = 30.0;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        SolveResult result = solver.solve();
        REQUIRE(result.found);
        CHECK(result.best.steps.size() == 1);
        CHECK(result.best_cost == 1.0);
    }
}

TEST_CASE("convergence log is non-increasing and anytime-monotone") {
    Instance inst(builtin_problem("nisqmr").source, gen_arch("grid", 2, 3),
                  "cx 0 1\ncx 2 3\ncx 1 2\ncx 0 3\ncx 0 5\n");
    SolverConfig cfg;
    cfg.seed = 5;
    cfg.jobs = 2;
    cfg.timeout_seconds = 20.0;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    SolveResult result = solver.solve();
    REQUIRE(result.found);
    REQUIRE_FALSE(result.log.empty());
    for (std::size_t i = 1; i < result.log.size(); ++i) {
        CHECK(result.log[i].best_cost < result.log[i - 1].best_cost);
        CHECK(result.log[i].wall_seconds >= result.log[i - 1].wall_seconds);
    }
    CHECK(result.log.back().best_cost == result.best_cost);
}

TEST_CASE("solve never beats the oracle and matches it on small instances") {
    std::mt19937_64 rng(99);
    int matched = 0, total = 0;
    for (int round = 0; round < 10; ++round) {
        std::string circuit_text = random_circuit_text(rng, 4, 6, false);
        Instance inst(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), circuit_text);
        double exact = brute_force_oracle(*inst.sm, inst.circuit);
        SolverConfig cfg;
        cfg.seed = rng();
        cfg.timeout_seconds = 10.0;
        Solver solver(inst.sm.get(), &inst.circuit, cfg);
        SolveResult result = solver.solve();
        REQUIRE(result.found);
        CHECK(result.best_cost >= exact - 1e-9);
        ++total;
        if (std::fabs(result.best_cost - exact) < 1e-9) ++matched;
    }
    // tiny instances should essentially always reach the optimum
    CHECK(matched == total);
}

TEST_CASE("maximality: no leftover front-layer gate fits a finished state") {
    Instance inst(builtin_problem("scmr").source, gen_arch("grid", 3, 3),
                  "cx 0 1\ncx 2 3\ncx 0 3\ncx 1 2\n");
    SolverConfig cfg;
    cfg.seed = 21;
    cfg.timeout_seconds = 20.0;
    Solver solver(inst.sm.get(), &inst.circuit, cfg);
    SolveResult result = solver.solve();
    REQUIRE(result.found);

    // replay: for each step, every unrouted routable front instruction must
    // have no realization against the finished state
    std::set<int> removed;
    for (const auto& step : result.best.steps) {
        for (int idx : inst.circuit.front_layer(removed)) {
            const Instruction& ins = inst.circuit.instructions()[static_cast<std::size_t>(idx)];
            if (!inst.program.routes_gate(ins.gate)) continue;
            if (step.state.routes_instr(idx)) continue;
            CHECK(inst.sm->realize(step.state, ins).empty());
        }
        for (const auto& r : step.state.routes) removed.insert(r.instr->index);
        for (int idx : step.nonrouted) removed.insert(idx);
    }
}
