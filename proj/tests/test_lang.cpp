#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "arch_io.hpp"
#include "diagnostics.hpp"
#include "eval.hpp"
#include "negative_programs.hpp"
#include "parser.hpp"
#include "problems.hpp"
#include "statemachine.hpp"
#include "test_util.hpp"
#include "typecheck.hpp"

using namespace marol;

namespace {

// nisqmr on line-4 with the identity map over the four-gate circuit.
struct Fixture {
    MarolProgram program;
    LoadedArch arch;
    Circuit circuit;
    EvalContext ctx;

    explicit Fixture(const std::string& source = builtin_problem("nisqmr").source,
                     const std::string& arch_json = gen_arch("line", 4, 0),
                     const std::string& circuit_text = fig2_circuit_text()) {
        program = parse_program(source);
        typecheck(program);
        arch = parse_arch(arch_json, program);
        circuit = parse_circuit(circuit_text);
        ctx.program = &program;
        ctx.arch = arch.data;
    }

    Value identity_map() const {
        std::vector<int> locs;
        for (int i = 0; i < circuit.qubit_count(); ++i) locs.push_back(i);
        return make_qubit_map(circuit, locs);
    }

    Value instr(int idx) const {
        auto data = std::make_shared<InstrData>();
        data->instr = &circuit.instructions()[static_cast<std::size_t>(idx)];
        return Value::instr(std::move(data));
    }

    Value empty_state(const Value& map) const { return make_state_value(map, {}); }

    // Evaluates a standalone expression after checking it at `expected`.
    Value eval_expr(const std::string& text, const Type& expected, const ExprScope& scope = {},
                    const EvalEnv& env = {}) const {
        ExprPtr e = parse_expression(text);
        typecheck_expression(program, *e, expected, scope);
        return eval(ctx, *e, env);
    }
};

} // namespace

TEST_CASE("the bundled nisqmr source parses to the expected shape") {
    Fixture fx;
    CHECK(fx.program.routed_gates == std::vector<std::string>{"cx"});
    REQUIRE(fx.program.realization_decl.fields.size() == 1);
    CHECK(fx.program.realization_decl.fields[0].first == "edge");
    CHECK(fx.program.realization_decl.fields[0].second ==
          Type::pair(Type::loc(), Type::loc()));
    CHECK_FALSE(fx.program.has_arch_info);
    CHECK(fx.program.state_cost == nullptr);
    CHECK(analyze_noninterference(fx.program));
}

TEST_CASE("the completed variable-error source parses with its blocks") {
    MarolProgram p = parse_program(builtin_problem("nisq_ve").source);
    typecheck(p);
    REQUIRE(p.has_arch_info);
    REQUIRE(p.arch_decl.fields.size() == 1);
    CHECK(p.arch_decl.fields[0].first == "edge_cost");
    CHECK(p.arch_decl.fields[0].second == Type::list(Type::list(Type::real())));
    CHECK(p.state_cost != nullptr);
    CHECK(p.get_locations == nullptr);
    CHECK(analyze_noninterference(p));
}

TEST_CASE("the surface-code source is interfering and declares its fields") {
    MarolProgram p = parse_program(builtin_problem("scmr").source);
    typecheck(p);
    CHECK(p.routed_gates == std::vector<std::string>{"cx", "t"});
    CHECK_FALSE(analyze_noninterference(p));
    CHECK(p.get_locations != nullptr);
}

TEST_CASE("noninterference is syntactic: a dead-branch route access counts") {
    std::string src = nisqmr_realize(
        "if contains([loc(0)], loc(1))\n"
        "then map(|g| -> GateRealization{edge = (loc(0), loc(1))}, State.route)\n"
        "else map(|x| -> GateRealization{edge = x},\n"
        "     Arch.edges_between(State.map[Gate.qubits[0]], State.map[Gate.qubits[1]]))");
    MarolProgram p = parse_program(src);
    typecheck(p);
    CHECK_FALSE(analyze_noninterference(p));
}

TEST_CASE("pretty-printing round-trips programs") {
    for (const auto& bundle : builtin_problems()) {
        MarolProgram p = parse_program(bundle.source);
        MarolProgram q = parse_program(to_source(p));
        CHECK(program_equal(p, q));
        // idempotent: printing the reparse gives the same text
        CHECK(to_source(p) == to_source(q));
    }
}

TEST_CASE("negative programs produce their diagnostics") {
    for (const auto& neg : negative_programs()) {
        CAPTURE(neg.label);
        if (neg.kind == 'p') {
            try {
                MarolProgram p = parse_program(neg.source);
                typecheck(p);
                FAIL("expected a parse error for ", neg.label);
            } catch (const ParseError& e) {
                CHECK(std::string(e.what()).find(neg.expected_substring) != std::string::npos);
            }
        } else if (neg.kind == 't') {
            MarolProgram p = parse_program(neg.source);
            try {
                typecheck(p);
                FAIL("expected a type error for ", neg.label);
            } catch (const TypeErrors& e) {
                CHECK(std::string(e.what()).find(neg.expected_substring) != std::string::npos);
            }
        } else {
            MarolProgram p = parse_program(neg.source);
            typecheck(p);
            Fixture fx; // instance to evaluate against
            EvalContext ctx;
            ctx.program = &p;
            ctx.arch = fx.arch.data;
            try {
                call_realize_gate(ctx, fx.empty_state(fx.identity_map()), fx.instr(0));
                FAIL("expected a stuck evaluation for ", neg.label);
            } catch (const EvalError& e) {
                std::string msg = e.what();
                CHECK(msg.find("realize_gate") != std::string::npos); // names the operation
                CHECK(msg.find(neg.expected_substring) != std::string::npos);
            }
        }
    }
}

TEST_CASE("arithmetic, comparison and conditional evaluation") {
    Fixture fx;
    CHECK(fx.eval_expr("1 + 2 * 3", Type::integer()).as_int() == 7);
    CHECK(fx.eval_expr("(1 + 2) * 3", Type::integer()).as_int() == 9);
    CHECK(fx.eval_expr("7 / 2", Type::integer()).as_int() == 3);
    CHECK(fx.eval_expr("1.5 + 2.25", Type::real()).as_float() == doctest::Approx(3.75));
    CHECK(fx.eval_expr("1.0 / 4.0", Type::real()).as_float() == doctest::Approx(0.25));
    CHECK(fx.eval_expr("if 1 < 2 then 10 else 20", Type::integer()).as_int() == 10);
    CHECK(fx.eval_expr("if 2 <= 1 then 10 else 20", Type::integer()).as_int() == 20);
    CHECK(fx.eval_expr("if 3 > 2 then 1 else 2", Type::integer()).as_int() == 1);
    CHECK(fx.eval_expr("if 3 >= 4 then 1 else 2", Type::integer()).as_int() == 2);
    CHECK(fx.eval_expr("if 1 != 2 then 1 else 2", Type::integer()).as_int() == 1);
    CHECK(fx.eval_expr("if \"cx\" == \"cx\" then 1 else 2", Type::integer()).as_int() == 1);
}

TEST_CASE("pairs, projections, lists, indexing and loc") {
    Fixture fx;
    CHECK(fx.eval_expr("(1, 2).(0)", Type::integer()).as_int() == 1);
    CHECK(fx.eval_expr("(1, 2).(1)", Type::integer()).as_int() == 2);
    CHECK(fx.eval_expr("[10, 20, 30][2]", Type::integer()).as_int() == 30);
    // a Loc used as a list index
    CHECK(fx.eval_expr("[10, 20, 30][loc(1)]", Type::integer()).as_int() == 20);
    CHECK(values_equal(fx.eval_expr("loc(3)", Type::loc()), Value::loc(3)));
    CHECK_THROWS_AS(fx.eval_expr("[1][5]", Type::integer()), EvalError);
}

TEST_CASE("library list functions") {
    Fixture fx;
    SUBCASE("push") {
        Value v = fx.eval_expr("push([1, 2], 3)", Type::list(Type::integer()));
        REQUIRE(v.as_list().size() == 3);
        CHECK(v.as_list()[2].as_int() == 3);
    }
    SUBCASE("concat") {
        Value v = fx.eval_expr("concat([1], [2, 3])", Type::list(Type::integer()));
        CHECK(v.as_list().size() == 3);
        CHECK(fx.eval_expr("concat([], [])", Type::list(Type::integer())).as_list().empty());
    }
    SUBCASE("contains") {
        CHECK(fx.eval_expr("contains([1, 2], 2)", Type::boolean()).as_bool());
        CHECK_FALSE(fx.eval_expr("contains([1, 2], 5)", Type::boolean()).as_bool());
        CHECK_FALSE(fx.eval_expr("contains([], 5)", Type::boolean()).as_bool());
    }
    SUBCASE("combinations") {
        Value v = fx.eval_expr("combinations([1, 2, 3], 2)",
                               Type::list(Type::list(Type::integer())));
        REQUIRE(v.as_list().size() == 3);
        CHECK(v.as_list()[0].as_list()[0].as_int() == 1);
        CHECK(v.as_list()[0].as_list()[1].as_int() == 2);
        CHECK(fx.eval_expr("combinations([1], 0)", Type::list(Type::list(Type::integer())))
                  .as_list()
                  .size() == 1);
        CHECK(fx.eval_expr("combinations([1], 2)", Type::list(Type::list(Type::integer())))
                  .as_list()
                  .empty());
    }
    SUBCASE("map") {
        Value v = fx.eval_expr("map(|x| -> x + 1, [1, 2])", Type::list(Type::integer()));
        CHECK(v.as_list()[0].as_int() == 2);
        CHECK(v.as_list()[1].as_int() == 3);
        CHECK(fx.eval_expr("map(|x| -> x, [])", Type::list(Type::integer())).as_list().empty());
    }
    SUBCASE("fold") {
        CHECK(fx.eval_expr("fold(0, |acc,x| -> acc + x, [1.0, 2.0])", Type::real()).as_float() ==
              doctest::Approx(3.0));
        CHECK(fx.eval_expr("fold(5, |acc,x| -> acc + x, [])", Type::integer()).as_int() == 5);
        CHECK(fx.eval_expr("fold(0, |acc,x| -> acc + x, [1, 2, 3])", Type::integer()).as_int() ==
              6);
    }
    SUBCASE("direct lambda application") {
        CHECK(fx.eval_expr("(|x, y| -> x + y)(3, 4)", Type::integer()).as_int() == 7);
    }
}

TEST_CASE("graph library functions") {
    Fixture fx;
    SUBCASE("edges") {
        Value v = fx.eval_expr("Arch.edges()", Type::list(Type::pair(Type::loc(), Type::loc())));
        REQUIRE(v.as_list().size() == 3);
        CHECK(values_equal(v.as_list()[0], Value::pair(Value::loc(0), Value::loc(1))));
    }
    SUBCASE("edges_between") {
        Value hit = fx.eval_expr("Arch.edges_between(loc(0), loc(1))",
                                 Type::list(Type::pair(Type::loc(), Type::loc())));
        REQUIRE(hit.as_list().size() == 1);
        Value miss = fx.eval_expr("Arch.edges_between(loc(0), loc(2))",
                                  Type::list(Type::pair(Type::loc(), Type::loc())));
        CHECK(miss.as_list().empty());
        Value self = fx.eval_expr("Arch.edges_between(loc(1), loc(1))",
                                  Type::list(Type::pair(Type::loc(), Type::loc())));
        CHECK(self.as_list().empty());
        CHECK_THROWS_AS(fx.eval_expr("Arch.edges_between(loc(0), loc(9))",
                                     Type::list(Type::pair(Type::loc(), Type::loc()))),
                        EvalError);
    }
    SUBCASE("all_paths and steiner_trees") {
        Value p = fx.eval_expr("all_paths(Arch, [loc(0)], [loc(2)], [])",
                               Type::list(Type::list(Type::loc())));
        REQUIRE_FALSE(p.as_list().empty());
        CHECK(p.as_list()[0].as_list().size() == 3);
        Value blocked = fx.eval_expr("all_paths(Arch, [loc(0)], [loc(2)], [loc(1)])",
                                     Type::list(Type::list(Type::loc())));
        CHECK(blocked.as_list().empty());
        Value t = fx.eval_expr("steiner_trees(Arch, [loc(0), loc(1)], [])",
                               Type::list(Type::list(Type::loc())));
        REQUIRE_FALSE(t.as_list().empty());
        CHECK(t.as_list()[0].as_list().size() == 2);
    }
    SUBCASE("grid helpers") {
        Value p = fx.eval_expr("to_2d(loc(4), 3)", Type::pair(Type::integer(), Type::integer()));
        CHECK(p.as_pair().first.as_int() == 1);
        CHECK(p.as_pair().second.as_int() == 1);
        Value h = fx.eval_expr("horizontal_neighbors(loc(0), 3)", Type::list(Type::loc()));
        REQUIRE(h.as_list().size() == 1);
        CHECK(h.as_list()[0].as_loc() == 1);
        Value hb = fx.eval_expr("horizontal_neighbors(loc(1), 3)", Type::list(Type::loc()));
        CHECK(hb.as_list().size() == 2);
        Value he = fx.eval_expr("horizontal_neighbors(loc(0), 1)", Type::list(Type::loc()));
        CHECK(he.as_list().empty());
        Value v = fx.eval_expr("vertical_neighbors(loc(4), 3, 3)", Type::list(Type::loc()));
        REQUIRE(v.as_list().size() == 2);
        CHECK(v.as_list()[0].as_loc() == 1);
        CHECK(v.as_list()[1].as_loc() == 7);
        Value va = fx.eval_expr("vertical_neighbors(loc(0), 3, 3)", Type::list(Type::loc()));
        CHECK(va.as_list().size() == 1);
    }
}

TEST_CASE("instruction accessors") {
    Fixture fx;
    EvalEnv env;
    env.instr = fx.instr(2); // cx 1 3
    ExprScope scope;
    scope.instr = true;
    Value q = fx.eval_expr("Instr.qubits", Type::list(Type::qubit()), scope, env);
    REQUIRE(q.as_list().size() == 2);
    CHECK(q.as_list()[0].as_qubit() == 1);
    CHECK(q.as_list()[1].as_qubit() == 3);
    CHECK(fx.eval_expr("Instr.gate_type", Type::string(), scope, env).as_str() == "cx");
    CHECK(fx.eval_expr("Gate.gate_type", Type::string(), scope, env).as_str() == "cx");
    CHECK(fx.eval_expr("gate_type(Instr)", Type::string(), scope, env).as_str() == "cx");
    CHECK(fx.eval_expr("qubits(Instr)", Type::list(Type::qubit()), scope, env)
              .as_list()
              .size() == 2);
    CHECK(fx.eval_expr("if Instr.gate_type == \"cx\" then 1 else 0", Type::integer(), scope, env)
              .as_int() == 1);
}

TEST_CASE("value_swap covers swap, move and no-match") {
    Fixture fx;
    ExprScope scope;
    scope.qubit_map = true;
    EvalEnv env;
    env.qubit_map = fx.identity_map(); // q0..q3 at 0..3

    SUBCASE("both ends mapped: swap") {
        Value m = fx.eval_expr("value_swap(QubitMap, loc(1), loc(2))", Type::qubit_map(), scope,
                               env);
        CHECK(m.as_qubit_map().locs == std::vector<int>{0, 2, 1, 3});
    }
    SUBCASE("identity when both ends are unused") {
        Fixture fx2(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), "cx 0 1\n");
        EvalEnv env2;
        env2.qubit_map = make_qubit_map(fx2.circuit, {0, 1});
        Value m = fx2.eval_expr("value_swap(QubitMap, loc(2), loc(3))", Type::qubit_map(), scope,
                                env2);
        CHECK(m.as_qubit_map().locs == std::vector<int>{0, 1});
    }
    SUBCASE("left end mapped: move into the unused location") {
        Fixture fx2(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), "cx 0 1\n");
        EvalEnv env2;
        env2.qubit_map = make_qubit_map(fx2.circuit, {0, 1});
        Value m = fx2.eval_expr("value_swap(QubitMap, loc(1), loc(3))", Type::qubit_map(), scope,
                                env2);
        CHECK(m.as_qubit_map().locs == std::vector<int>{0, 3});
    }
    SUBCASE("right end mapped: move the other way") {
        Fixture fx2(builtin_problem("nisqmr").source, gen_arch("line", 4, 0), "cx 0 1\n");
        EvalEnv env2;
        env2.qubit_map = make_qubit_map(fx2.circuit, {0, 1});
        Value m = fx2.eval_expr("value_swap(QubitMap, loc(3), loc(1))", Type::qubit_map(), scope,
                                env2);
        CHECK(m.as_qubit_map().locs == std::vector<int>{0, 3});
    }
}

TEST_CASE("program calls on the nisqmr instance") {
    Fixture fx;
    Value map = fx.identity_map();
    Value state = fx.empty_state(map);

    SUBCASE("realize_gate finds the adjacent edge") {
        auto cands = call_realize_gate(fx.ctx, state, fx.instr(0)); // cx 0 1
        REQUIRE(cands.size() == 1);
        const StructData& s = cands[0].as_struct();
        CHECK(s.name == "GateRealization");
        CHECK(values_equal(*s.field("edge"), Value::pair(Value::loc(0), Value::loc(1))));
    }
    SUBCASE("realize_gate is empty for distant qubits") {
        CHECK(call_realize_gate(fx.ctx, state, fx.instr(2)).empty()); // cx 1 3
        CHECK(call_realize_gate(fx.ctx, state, fx.instr(3)).empty()); // cx 0 2
    }
    SUBCASE("get_transitions is IdTrans plus one per edge") {
        auto ts = call_get_transitions(fx.ctx, state);
        REQUIRE(ts.size() == 4);
        CHECK(ts[0].is_id_trans());
        for (std::size_t i = 1; i < ts.size(); ++i)
            CHECK(ts[i].as_struct().name == "Transition");
    }
    SUBCASE("apply performs the swap") {
        auto ts = call_get_transitions(fx.ctx, state);
        // ts[2] is the swap along (1, 2)
        Value m2 = call_apply(fx.ctx, ts[2], map);
        CHECK(m2.as_qubit_map().locs == std::vector<int>{0, 2, 1, 3});
        // IdTrans short-circuits
        CHECK(values_equal(call_apply(fx.ctx, ts[0], map), map));
    }
    SUBCASE("cost is 1 for swaps and 0 for the identity") {
        auto ts = call_get_transitions(fx.ctx, state);
        CHECK(call_cost(fx.ctx, ts[0]) == 0.0);
        CHECK(call_cost(fx.ctx, ts[1]) == 1.0);
    }
    SUBCASE("state cost defaults to zero without StateInfo") {
        CHECK(call_state_cost(fx.ctx, state) == 0.0);
    }
    SUBCASE("locations default to all vertices") {
        CHECK(call_get_locations(fx.ctx) == std::vector<int>{0, 1, 2, 3});
    }
}

TEST_CASE("variable-error cost reads the arch matrix") {
    std::string arch_json = gen_ve_errors(gen_arch("line", 4, 0), 99);
    Fixture fx(builtin_problem("nisq_ve").source, arch_json, fig2_circuit_text());
    Value state = fx.empty_state(fx.identity_map());
    auto ts = call_get_transitions(fx.ctx, state);
    REQUIRE(ts.size() == 4);
    CHECK(call_cost(fx.ctx, ts[0]) == 0.0);
    const Value* matrix = fx.arch.data->field("edge_cost");
    REQUIRE(matrix);
    double expected = matrix->as_list()[0].as_list()[1].as_float();
    CHECK(call_cost(fx.ctx, ts[1]) == doctest::Approx(expected));
    CHECK(expected > 0.0);

    // StateInfo sums the routed gates' costs through State.route
    auto cands = call_realize_gate(fx.ctx, state, fx.instr(0));
    REQUIRE(cands.size() == 1);
    auto data = std::make_shared<InstrData>();
    data->instr = &fx.circuit.instructions()[0];
    data->realization = std::make_shared<const Value>(cands[0]);
    Value routed_state = make_state_value(fx.identity_map(), {Value::instr(std::move(data))});
    CHECK(call_state_cost(fx.ctx, routed_state) == doctest::Approx(expected));
}

TEST_CASE("evaluation is pure and deterministic") {
    Fixture fx;
    ExprPtr e = parse_expression("map(|x| -> GateRealization{edge = x}, Arch.edges())");
    ExprScope scope;
    typecheck_expression(fx.program, *e, Type::list(Type::strct("GateRealization")), scope);
    Value a = eval(fx.ctx, *e, {});
    Value b = eval(fx.ctx, *e, {});
    CHECK(values_equal(a, b));
}

TEST_CASE("the fuel counter trips runaway evaluation but not the corpus") {
    Fixture fx;
    EvalContext tiny = fx.ctx;
    tiny.fuel_budget = 10;
    ExprPtr e = parse_expression("fold(0, |acc,x| -> acc + 1, combinations([1,2,3,4,5,6,7,8], 4))");
    ExprScope scope;
    typecheck_expression(fx.program, *e, Type::integer(), scope);
    CHECK_THROWS_AS(eval(tiny, *e, {}), EvalError);
    CHECK(eval(fx.ctx, *e, {}).as_int() == 70);

    // the bundled programs never trip the default budget
    Value state = fx.empty_state(fx.identity_map());
    CHECK_NOTHROW(call_realize_gate(fx.ctx, state, fx.instr(0)));
    CHECK_NOTHROW(call_get_transitions(fx.ctx, state));
}

TEST_CASE("fuzzed states never get the bundled programs stuck") {
    std::mt19937_64 rng(101);
    for (const auto& bundle : builtin_problems()) {
        std::string arch_json = bundle.name == "nisq_ve"
                                    ? gen_ve_errors(gen_arch("grid", 2, 2), 3)
                                    : gen_arch("grid", 2, 2);
        Fixture fx(bundle.source, arch_json, "cx 0 1\ncx 1 2\ncx 0 2\nt 0\n");
        StateMachine sm(&fx.program, fx.arch);
        for (int round = 0; round < 60; ++round) {
            // random injective map over Locs
            std::vector<int> pool = sm.locs();
            for (std::size_t i = pool.size(); i > 1; --i)
                std::swap(pool[i - 1], pool[rng() % i]);
            pool.resize(static_cast<std::size_t>(fx.circuit.qubit_count()));
            Value map = make_qubit_map(fx.circuit, pool);
            Value state = fx.empty_state(map);
            int g = static_cast<int>(rng() % fx.circuit.size());
            if (!fx.program.routes_gate(fx.circuit.instructions()[g].gate)) continue;
            CHECK_NOTHROW(call_realize_gate(fx.ctx, state, fx.instr(g)));
            auto ts = call_get_transitions(fx.ctx, state);
            for (const auto& t : ts) {
                Value m = call_apply(fx.ctx, t, map);
                // injectivity preserved on every fuzzed input
                std::vector<int> locs = m.as_qubit_map().locs;
                std::sort(locs.begin(), locs.end());
                CHECK(std::adjacent_find(locs.begin(), locs.end()) == locs.end());
                CHECK(call_cost(fx.ctx, t) >= 0.0);
            }
        }
    }
}
