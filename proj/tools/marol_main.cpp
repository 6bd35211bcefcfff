// marol CLI: batch front-end over the shared-library C API.
//
// Subcommands: solve, validate, check, oracle, bench. Machine-readable
// results go to stdout, diagnostics to stderr. Exit codes: 0 success,
// 1 load/parse/typecheck error, 2 no solution (solve) or violations
// (validate).

#include <csignal>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "marol.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

struct CString {
    char* ptr = nullptr;
    ~CString() { marol_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

struct ProgramHandle {
    marol_program* p = nullptr;
    ~ProgramHandle() { marol_program_free(p); }
};
struct ArchHandle {
    marol_arch* a = nullptr;
    ~ArchHandle() { marol_arch_free(a); }
};
struct CircuitHandle {
    marol_circuit* c = nullptr;
    ~CircuitHandle() { marol_circuit_free(c); }
};
struct ResultHandle {
    marol_result* r = nullptr;
    ~ResultHandle() { marol_result_free(r); }
};

[[noreturn]] void die(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(1);
}

void load_instance(const std::string& program_path, const std::string& arch_path,
                   const std::string& circuit_path, ProgramHandle& program, ArchHandle& arch,
                   CircuitHandle& circuit) {
    if (marol_program_parse(read_file(program_path).c_str(), &program.p) != MAROL_OK)
        die(program_path + ":\n" + marol_last_error());
    if (marol_arch_parse(read_file(arch_path).c_str(), program.p, &arch.a) != MAROL_OK)
        die(arch_path + ": " + marol_last_error());
    if (marol_circuit_parse(read_file(circuit_path).c_str(), &circuit.c) != MAROL_OK)
        die(circuit_path + ": " + marol_last_error());
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void handle_sigint(int) { marol_request_stop(); }

std::string format_cost(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

// Earliest wall time at which the best cost was within `factor` of the final
// best (from the convergence CSV).
std::optional<double> time_to_threshold(const std::string& csv, double final_best,
                                        double factor) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string t, w, c;
        if (!std::getline(ls, t, ',') || !std::getline(ls, w, ',') || !std::getline(ls, c, ','))
            continue;
        if (std::stod(c) <= factor * final_best + 1e-12) return std::stod(t);
    }
    return std::nullopt;
}

struct SolveOutcome {
    int exit_code = 1;
    ordered_json report;
    std::string solution_json;
    std::string convergence_csv;
};

SolveOutcome run_solve(const std::string& program_path, const std::string& arch_path,
                       const std::string& circuit_path, const marol_config& cfg) {
    ProgramHandle program;
    ArchHandle arch;
    CircuitHandle circuit;
    load_instance(program_path, arch_path, circuit_path, program, arch, circuit);

    ResultHandle result;
    marol_status status = marol_solve(program.p, arch.a, circuit.c, &cfg, &result.r);
    if (status == MAROL_ERROR) die(marol_last_error());

    SolveOutcome out;
    CString report_str{marol_result_report_json(result.r)};
    out.report = ordered_json::parse(report_str.str());
    out.report["program"] = program_path;
    out.report["arch"] = arch_path;
    out.report["circuit"] = circuit_path;
    CString csv{marol_result_convergence_csv(result.r)};
    out.convergence_csv = csv.str();
    if (status == MAROL_OK) {
        CString sol{marol_result_solution_json(result.r)};
        out.solution_json = sol.str();
        out.exit_code = 0;
    } else {
        out.exit_code = 2;
    }
    return out;
}

int cmd_solve(const std::string& program_path, const std::string& arch_path,
              const std::string& circuit_path, double timeout, std::optional<std::uint64_t> seed,
              int jobs, const std::string& out_path, const std::string& log_path,
              bool no_warm_start, bool no_criticality) {
    marol_config cfg;
    marol_config_init(&cfg);
    cfg.timeout_seconds = timeout;
    cfg.seed = seed ? *seed : entropy_seed();
    cfg.jobs = jobs;
    cfg.warm_start = no_warm_start ? 0 : 1;
    cfg.criticality_weighting = no_criticality ? 0 : 1;

    SolveOutcome outcome = run_solve(program_path, arch_path, circuit_path, cfg);
    if (!out_path.empty() && outcome.exit_code == 0) write_file(out_path, outcome.solution_json);
    if (!log_path.empty()) write_file(log_path, outcome.convergence_csv);
    outcome.report["solution_file"] = out_path.empty() ? ordered_json() : ordered_json(out_path);
    outcome.report["convergence_log"] =
        log_path.empty() ? ordered_json() : ordered_json(log_path);
    std::cout << outcome.report.dump(2) << "\n";
    if (outcome.exit_code == 2) std::cerr << "no solution found within the timeout\n";
    return outcome.exit_code;
}

int cmd_validate(const std::string& program_path, const std::string& arch_path,
                 const std::string& circuit_path, const std::string& solution_path) {
    ProgramHandle program;
    ArchHandle arch;
    CircuitHandle circuit;
    load_instance(program_path, arch_path, circuit_path, program, arch, circuit);

    CString violations;
    marol_status status = marol_validate(program.p, arch.a, circuit.c,
                                         read_file(solution_path).c_str(), &violations.ptr);
    if (status == MAROL_OK) {
        std::cout << "ok\n";
        return 0;
    }
    if (status == MAROL_INVALID) {
        std::cout << violations.str() << "\n";
        return 2;
    }
    die(marol_last_error());
}

int cmd_check(const std::string& program_path) {
    ProgramHandle program;
    if (marol_program_parse(read_file(program_path).c_str(), &program.p) != MAROL_OK)
        die(program_path + ":\n" + marol_last_error());
    std::cout << (marol_program_noninterfering(program.p) ? "non-interfering" : "interfering")
              << "\n";
    return 0;
}

int cmd_oracle(const std::string& program_path, const std::string& arch_path,
               const std::string& circuit_path, const std::string& bounds_text) {
    ProgramHandle program;
    ArchHandle arch;
    CircuitHandle circuit;
    load_instance(program_path, arch_path, circuit_path, program, arch, circuit);

    marol_oracle_bounds bounds;
    marol_oracle_bounds_init(&bounds);
    if (!bounds_text.empty()) {
        int q, l, g, t;
        if (std::sscanf(bounds_text.c_str(), "%d,%d,%d,%d", &q, &l, &g, &t) != 4)
            die("--bounds expects Q,L,G,T (e.g. 4,5,8,8)");
        bounds.max_qubits = q;
        bounds.max_locs = l;
        bounds.max_instructions = g;
        bounds.max_transitions = t;
    }
    double cost = 0.0;
    if (marol_oracle(program.p, arch.a, circuit.c, &bounds, &cost) != MAROL_OK)
        die(marol_last_error());
    std::cout << format_cost(cost) << "\n";
    return 0;
}

int cmd_bench(const std::string& suite_path, const std::string& out_dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(suite_path));
    } catch (const std::exception& e) {
        die(std::string("manifest: ") + e.what());
    }
    if (!manifest.is_array()) die("manifest must be a JSON array");

    std::ostringstream csv;
    csv << "instance,program,arch,circuit,seed,timeout,found,best_cost,wall_to_best,"
           "t_5pct,t_10pct,t_25pct,validated\n";
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        const auto& item = manifest[i];
        std::string program = item.at("program").get<std::string>();
        std::string arch = item.at("arch").get<std::string>();
        std::string circuit = item.at("circuit").get<std::string>();
        double timeout = item.value("timeout", 60.0);
        std::uint64_t seed = item.value("seed", 0ull);

        marol_config cfg;
        marol_config_init(&cfg);
        cfg.timeout_seconds = timeout;
        cfg.seed = seed;
        cfg.jobs = 1; // reproducible rows

        SolveOutcome outcome = run_solve(program, arch, circuit, cfg);
        std::string base = out_dir + "/instance_" + std::to_string(i);
        write_file(base + ".convergence.csv", outcome.convergence_csv);
        bool found = outcome.exit_code == 0;
        double best = found ? outcome.report["best_cost"].get<double>() : 0.0;
        if (found) write_file(base + ".solution.json", outcome.solution_json);

        auto threshold = [&](double f) -> std::string {
            if (!found) return "";
            auto t = time_to_threshold(outcome.convergence_csv, best, f);
            return t ? format_cost(*t) : "";
        };
        csv << i << "," << program << "," << arch << "," << circuit << "," << seed << ","
            << timeout << "," << (found ? "1" : "0") << ","
            << (found ? format_cost(best) : "") << ","
            << (found ? format_cost(outcome.report["wall_seconds_to_best"].get<double>()) : "")
            << "," << threshold(0.05) << "," << threshold(0.10) << "," << threshold(0.25) << ","
            << (found ? "1" : "") << "\n";
        std::cerr << "bench: instance " << i << (found ? " done, cost " + format_cost(best)
                                                       : " found no solution")
                  << "\n";
    }
    write_file(out_dir + "/results.csv", csv.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, handle_sigint);
    marol_clear_stop();

    CLI::App app{"Marol: compiler generation for qubit mapping and routing"};
    app.require_subcommand(1);

    // solve
    std::string program_path, arch_path, circuit_path, out_path, log_path, solution_path;
    std::string bounds_text, suite_path, out_dir;
    double timeout = 60.0;
    std::uint64_t seed_value = 0;
    bool no_warm_start = false, no_criticality = false;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (jobs > 16) jobs = 16;

    auto* solve = app.add_subcommand("solve", "compile a circuit onto an arch");
    solve->add_option("--program", program_path, "Marol program file")->required();
    solve->add_option("--arch", arch_path, "arch JSON file")->required();
    solve->add_option("--circuit", circuit_path, "circuit file")->required();
    solve->add_option("--timeout", timeout, "time budget in seconds");
    auto* seed_opt = solve->add_option("--seed", seed_value, "RNG seed (default: OS entropy)");
    solve->add_option("--jobs", jobs, "parallel workers");
    solve->add_option("--out", out_path, "write the solution JSON here");
    solve->add_option("--log", log_path, "write the convergence CSV here");
    solve->add_flag("--no-warm-start", no_warm_start, "disable the isomorphism warm start");
    solve->add_flag("--no-criticality", no_criticality, "disable criticality weighting");

    auto* validate = app.add_subcommand("validate", "check a solution against its instance");
    validate->add_option("--program", program_path)->required();
    validate->add_option("--arch", arch_path)->required();
    validate->add_option("--circuit", circuit_path)->required();
    validate->add_option("--solution", solution_path, "solution JSON file")->required();

    auto* check = app.add_subcommand("check", "parse, typecheck and classify a program");
    check->add_option("--program", program_path)->required();

    auto* oracle = app.add_subcommand("oracle", "exact minimum cost on a small instance");
    oracle->add_option("--program", program_path)->required();
    oracle->add_option("--arch", arch_path)->required();
    oracle->add_option("--circuit", circuit_path)->required();
    oracle->add_option("--bounds", bounds_text, "Q,L,G,T limits (default 4,5,8,8)");

    auto* bench = app.add_subcommand("bench", "run a manifest of instances, emit a CSV");
    bench->add_option("--suite", suite_path, "JSON array of instances")->required();
    bench->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            std::optional<std::uint64_t> seed;
            if (seed_opt->count() > 0) seed = seed_value;
            return cmd_solve(program_path, arch_path, circuit_path, timeout, seed, jobs,
                             out_path, log_path, no_warm_start, no_criticality);
        }
        if (validate->parsed())
            return cmd_validate(program_path, arch_path, circuit_path, solution_path);
        if (check->parsed()) return cmd_check(program_path);
        if (oracle->parsed())
            return cmd_oracle(program_path, arch_path, circuit_path, bounds_text);
        if (bench->parsed()) return cmd_bench(suite_path, out_dir);
    } catch (const std::exception& e) {
        die(e.what());
    }
    return 1;
}
