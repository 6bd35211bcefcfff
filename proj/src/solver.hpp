#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "statemachine.hpp"

namespace marol {

// Annealing schedule: start at tau_i, multiply by (1 - rate) per step, stop
// below tau_f.
struct SaSchedule {
    double tau_i = 10.0;
    double rate = 1e-3;
    double tau_f = 1e-5;
};

long long sa_step_count(const SaSchedule& s);
// min(1, exp(-delta / tau))
double sa_acceptance_probability(double delta, double tau);

struct SolverConfig {
    std::uint64_t seed = 0;
    double timeout_seconds = 60.0;
    int jobs = 1;
    SaSchedule sa_map;                  // initial-map search and main perm search
    std::vector<double> reduced_rates;  // defaulted in ctor
    PathBounds path_bounds;
    bool criticality_weighting = true;
    bool warm_start = true;
    // Evaluate candidate transitions with the full permutation search instead
    // of a single index-order pass.
    bool transition_full_search = false;
    // Forces this initial map (locations per ascending qubit id) and skips
    // the initial-map search; one deterministic run on worker 0.
    std::optional<std::vector<int>> fixed_map;
    std::atomic<bool>* stop_flag = nullptr;

    SolverConfig() {
        reduced_rates = {1e-2, 1e-1, 1.0 - std::pow(0.9, 10.0), 1.0};
    }
};

struct ConvergenceRecord {
    double wall_seconds = 0.0;
    int worker = 0;
    double best_cost = 0.0;
};

struct WorkerStats {
    int worker = 0;
    bool found = false;
    double best_cost = 0.0;
    long long runs = 0;       // completed maxstate runs
    long long solutions = 0;  // complete solutions among them
};

struct SolveResult {
    bool found = false;
    Solution best;
    double best_cost = 0.0;
    double wall_to_best = 0.0;
    double wall_total = 0.0;
    std::vector<ConvergenceRecord> log; // global best improvements, non-increasing
    std::vector<WorkerStats> workers;
};

// Deterministic per-worker random stream: a splitmix64-derived seed feeding
// mt19937_64; uniform draws below avoid implementation-defined distributions.
class Rng {
public:
    Rng(std::uint64_t seed, int worker);
    std::uint64_t next();
    double unit();                 // [0, 1)
    std::size_t index(std::size_t n); // [0, n)

private:
    std::mt19937_64 engine_;
};

using Clock = std::chrono::steady_clock;

struct Deadline {
    Clock::time_point at;
    std::atomic<bool>* stop = nullptr;
    bool passed() const {
        return (stop && stop->load(std::memory_order_relaxed)) || Clock::now() >= at;
    }
};

// The MaxState solver, instantiated for one (program, arch, circuit).
class Solver {
public:
    Solver(const StateMachine* sm, const Circuit* circuit, SolverConfig cfg);

    const std::vector<int>& criticality() const { return crit_; }

    // Sum of (1 + criticality) over routed gates (or plain count with
    // weighting off).
    double objective(const DeviceState& s) const;

    // One pass over the layer in the given order, recording one randomly
    // chosen realization per routable instruction.
    DeviceState route_one_pass(const std::vector<const Instruction*>& layer, const Value& map,
                               Rng& rng) const;

    // Best maximal state for the layer: single pass when non-interfering,
    // exhaustive permutations for tiny layers, otherwise the annealing
    // ladder over instruction orders.
    DeviceState max_state_search(const std::vector<const Instruction*>& layer, const Value& map,
                                 Rng& rng, const Deadline& deadline) const;

    // Alg. 1: full run from one initial map. Returns nothing if the deadline
    // expires or the run livelocks.
    std::optional<Solution> maxstate_run(const Value& initial_map, Rng& rng,
                                         const Deadline& deadline) const;

    // Interaction-graph warm start (identity-order map when the very first
    // embedding fails).
    std::vector<int> incremental_isomorphism() const;

    // Parallel anytime driver.
    SolveResult solve() const;

private:
    struct TransitionChoice {
        Value trans;
        Value new_map;
        double cost = 0.0;
        bool used_fallback = false;
        bool stuck = false; // identity forced with nothing routable: no progress possible
    };

    std::vector<const Instruction*> routable_front(const std::vector<int>& front) const;
    TransitionChoice select_transition(const DeviceState& state, const std::vector<int>& front,
                                       Rng& rng, const Deadline& deadline,
                                       std::optional<Value>& fallback_origin,
                                       bool routed_since_fallback) const;
    bool map_within_locs(const Value& map) const;
    std::vector<int> random_injective_locs(Rng& rng) const;

    struct Shared; // solve-time shared state
    void run_schedule(int worker, Rng& rng, const Deadline& deadline, Shared& shared,
                      WorkerStats& stats) const;
    double run_and_report(const Value& map, Rng& rng, const Deadline& deadline, int worker,
                          Shared& shared, WorkerStats& stats) const;

    const StateMachine* sm_;
    const Circuit* circuit_;
    SolverConfig cfg_;
    std::vector<int> crit_;
};

}  // namespace marol
