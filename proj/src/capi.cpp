#include "marol.h"

#include <atomic>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "arch_io.hpp"
#include "circuit.hpp"
#include "diagnostics.hpp"
#include "oracle.hpp"
#include "parser.hpp"
#include "problems.hpp"
#include "solver.hpp"
#include "statemachine.hpp"
#include "typecheck.hpp"

using namespace marol;

namespace {

thread_local std::string g_last_error;
std::atomic<bool> g_stop_flag{false};

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
marol_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MAROL_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return MAROL_ERROR;
    }
}

PathBounds bounds_from_config(const marol_config* cfg) {
    PathBounds b;
    if (!cfg) return b;
    if (cfg->max_paths > 0) b.max_paths = cfg->max_paths;
    if (cfg->path_length_slack >= 0) b.path_length_slack = cfg->path_length_slack;
    if (cfg->max_trees > 0) b.max_trees = cfg->max_trees;
    return b;
}

} // namespace

struct marol_program {
    MarolProgram program;
};

struct marol_arch {
    LoadedArch arch;
};

struct marol_circuit {
    Circuit circuit;
};

struct marol_result {
    SolveResult result;
    std::string solution_json;
    std::string report_json;
    marol_config config{};
};

extern "C" {

const char* marol_last_error(void) { return g_last_error.c_str(); }

void marol_string_free(char* s) { ::free(s); }

marol_status marol_program_parse(const char* source, marol_program** out) {
    return guarded([&] {
        auto handle = std::make_unique<marol_program>();
        handle->program = parse_program(source ? source : "");
        typecheck(handle->program);
        *out = handle.release();
        return MAROL_OK;
    });
}

marol_status marol_program_builtin(const char* name, marol_program** out) {
    return guarded([&] {
        const ProblemBundle& bundle = builtin_problem(name ? name : "");
        return marol_program_parse(bundle.source.c_str(), out);
    });
}

void marol_program_free(marol_program* p) { delete p; }

char* marol_program_source(const marol_program* p) { return dup_string(p->program.source); }

char* marol_program_pretty(const marol_program* p) { return dup_string(to_source(p->program)); }

int marol_program_noninterfering(const marol_program* p) {
    return analyze_noninterference(p->program) ? 1 : 0;
}

marol_status marol_arch_parse(const char* json, const marol_program* p, marol_arch** out) {
    return guarded([&] {
        auto handle = std::make_unique<marol_arch>();
        handle->arch = parse_arch(json ? json : "", p->program);
        *out = handle.release();
        return MAROL_OK;
    });
}

void marol_arch_free(marol_arch* a) { delete a; }

marol_status marol_circuit_parse(const char* text, marol_circuit** out) {
    return guarded([&] {
        auto handle = std::make_unique<marol_circuit>();
        handle->circuit = parse_circuit(text ? text : "");
        *out = handle.release();
        return MAROL_OK;
    });
}

void marol_circuit_free(marol_circuit* c) { delete c; }

int marol_circuit_qubit_count(const marol_circuit* c) { return c->circuit.qubit_count(); }

int marol_circuit_instruction_count(const marol_circuit* c) {
    return static_cast<int>(c->circuit.size());
}

marol_status marol_gen_arch(const char* kind, int p1, int p2, char** json_out) {
    return guarded([&] {
        *json_out = dup_string(gen_arch(kind ? kind : "", p1, p2));
        return MAROL_OK;
    });
}

marol_status marol_gen_ve_errors(const char* arch_json, uint64_t seed, char** json_out) {
    return guarded([&] {
        *json_out = dup_string(gen_ve_errors(arch_json ? arch_json : "", seed));
        return MAROL_OK;
    });
}

void marol_config_init(marol_config* cfg) {
    if (!cfg) return;
    cfg->seed = 0;
    cfg->timeout_seconds = 60.0;
    cfg->jobs = 1;
    cfg->warm_start = 1;
    cfg->criticality_weighting = 1;
    cfg->transition_full_search = 0;
    cfg->fixed_map = nullptr;
    cfg->fixed_map_len = 0;
    PathBounds defaults;
    cfg->max_paths = defaults.max_paths;
    cfg->path_length_slack = defaults.path_length_slack;
    cfg->max_trees = defaults.max_trees;
}

marol_status marol_solve(const marol_program* p, const marol_arch* a, const marol_circuit* c,
                         const marol_config* cfg, marol_result** out) {
    return guarded([&]() -> marol_status {
        marol_config config;
        marol_config_init(&config);
        if (cfg) config = *cfg;

        SolverConfig sc;
        sc.seed = config.seed;
        sc.timeout_seconds = config.timeout_seconds;
        sc.jobs = config.jobs > 0 ? config.jobs : 1;
        sc.warm_start = config.warm_start != 0;
        sc.criticality_weighting = config.criticality_weighting != 0;
        sc.transition_full_search = config.transition_full_search != 0;
        sc.path_bounds = bounds_from_config(&config);
        sc.stop_flag = &g_stop_flag;
        if (config.fixed_map && config.fixed_map_len > 0)
            sc.fixed_map =
                std::vector<int>(config.fixed_map, config.fixed_map + config.fixed_map_len);

        StateMachine sm(&p->program, a->arch, sc.path_bounds);
        Solver solver(&sm, &c->circuit, sc);
        SolveResult result = solver.solve();

        auto handle = std::make_unique<marol_result>();
        handle->config = config;
        if (result.found) {
            auto violations = sm.validate_solution(c->circuit, result.best);
            if (!violations.empty()) {
                std::string msg = "internal error: solver produced an invalid solution:";
                for (const auto& v : violations) msg += "\n  " + v.rule + ": " + v.message;
                g_last_error = msg;
                return MAROL_ERROR;
            }
            handle->solution_json = solution_to_json(result.best);
        }

        nlohmann::ordered_json report;
        report["found"] = result.found;
        if (result.found)
            report["best_cost"] = result.best_cost;
        else
            report["best_cost"] = nullptr;
        report["validated"] = result.found;
        report["wall_seconds_to_best"] = result.wall_to_best;
        report["wall_seconds_total"] = result.wall_total;
        report["seed"] = config.seed;
        report["jobs"] = sc.jobs;
        report["timeout_seconds"] = config.timeout_seconds;
        report["warm_start"] = sc.warm_start;
        report["criticality_weighting"] = sc.criticality_weighting;
        report["fixed_map"] = sc.fixed_map.has_value();
        report["workers"] = nlohmann::ordered_json::array();
        for (const auto& w : result.workers) {
            nlohmann::ordered_json jw;
            jw["id"] = w.worker;
            jw["found"] = w.found;
            if (w.found)
                jw["best_cost"] = w.best_cost;
            else
                jw["best_cost"] = nullptr;
            jw["runs"] = w.runs;
            jw["solutions"] = w.solutions;
            report["workers"].push_back(std::move(jw));
        }
        handle->report_json = report.dump(2) + "\n";

        bool found = result.found;
        handle->result = std::move(result);
        *out = handle.release();
        return found ? MAROL_OK : MAROL_NO_SOLUTION;
    });
}

void marol_result_free(marol_result* r) { delete r; }

double marol_result_cost(const marol_result* r) {
    return r->result.found ? r->result.best_cost : -1.0;
}

double marol_result_wall_to_best(const marol_result* r) { return r->result.wall_to_best; }

char* marol_result_solution_json(const marol_result* r) { return dup_string(r->solution_json); }

char* marol_result_convergence_csv(const marol_result* r) {
    std::ostringstream csv;
    csv << "wall_seconds,worker_id,best_cost\n";
    csv.precision(17);
    for (const auto& rec : r->result.log)
        csv << rec.wall_seconds << "," << rec.worker << "," << rec.best_cost << "\n";
    return dup_string(csv.str());
}

char* marol_result_report_json(const marol_result* r) { return dup_string(r->report_json); }

marol_status marol_validate(const marol_program* p, const marol_arch* a, const marol_circuit* c,
                            const char* solution_json, char** violations_out) {
    if (violations_out) *violations_out = nullptr;
    return guarded([&]() -> marol_status {
        StateMachine sm(&p->program, a->arch);
        Solution sol = solution_from_json(solution_json ? solution_json : "", p->program,
                                          c->circuit);
        auto violations = sm.validate_solution(c->circuit, sol);
        if (violations.empty()) return MAROL_OK;
        std::string text;
        for (const auto& v : violations) {
            if (!text.empty()) text += "\n";
            if (v.step >= 0) text += "step " + std::to_string(v.step) + ": ";
            text += v.rule + ": " + v.message;
        }
        if (violations_out) *violations_out = dup_string(text);
        return MAROL_INVALID;
    });
}

void marol_oracle_bounds_init(marol_oracle_bounds* b) {
    if (!b) return;
    OracleBounds defaults;
    b->max_qubits = defaults.max_qubits;
    b->max_locs = defaults.max_locs;
    b->max_instructions = defaults.max_instructions;
    b->max_transitions = defaults.max_transitions;
}

marol_status marol_oracle(const marol_program* p, const marol_arch* a, const marol_circuit* c,
                          const marol_oracle_bounds* bounds, double* cost_out) {
    return guarded([&] {
        OracleBounds ob;
        if (bounds) {
            ob.max_qubits = bounds->max_qubits;
            ob.max_locs = bounds->max_locs;
            ob.max_instructions = bounds->max_instructions;
            ob.max_transitions = bounds->max_transitions;
        }
        StateMachine sm(&p->program, a->arch);
        *cost_out = brute_force_oracle(sm, c->circuit, ob);
        return MAROL_OK;
    });
}

void marol_request_stop(void) { g_stop_flag.store(true); }

void marol_clear_stop(void) { g_stop_flag.store(false); }

} // extern "C"
