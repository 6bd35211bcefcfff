#include "solver.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <thread>

#include "diagnostics.hpp"

namespace marol {

namespace {
constexpr double kInfCost = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
} // namespace

long long sa_step_count(const SaSchedule& s) {
    if (s.rate >= 1.0) return 1;
    return static_cast<long long>(
        std::ceil(std::log(s.tau_f / s.tau_i) / std::log1p(-s.rate)));
}

double sa_acceptance_probability(double delta, double tau) {
    if (delta <= 0.0) return 1.0;
    return std::exp(-delta / tau);
}

Rng::Rng(std::uint64_t seed, int worker)
    : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(worker) + 1))) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) { return n <= 1 ? 0 : next() % n; }

Solver::Solver(const StateMachine* sm, const Circuit* circuit, SolverConfig cfg)
    : sm_(sm), circuit_(circuit), cfg_(std::move(cfg)) {
    crit_ = circuit_->criticality();
    for (const auto& ins : circuit_->instructions())
        if (ins.multi_qubit() && !sm_->program().routes_gate(ins.gate))
            throw LoadError("instruction " + std::to_string(ins.index) + " ('" + ins.gate +
                            "') is multi-qubit but not in routed_gates; it can never be placed");
    if (circuit_->qubit_count() > static_cast<int>(sm_->locs().size()))
        throw LoadError("unsatisfiable instance: " + std::to_string(circuit_->qubit_count()) +
                        " circuit qubits but only " + std::to_string(sm_->locs().size()) +
                        " mapping locations");
}

double Solver::objective(const DeviceState& s) const {
    double total = 0.0;
    for (const auto& r : s.routes)
        total += cfg_.criticality_weighting
                     ? 1.0 + static_cast<double>(crit_[static_cast<std::size_t>(r.instr->index)])
                     : 1.0;
    return total;
}

DeviceState Solver::route_one_pass(const std::vector<const Instruction*>& layer, const Value& map,
                                   Rng& rng) const {
    DeviceState state;
    state.map = map;
    for (const Instruction* ins : layer) {
        std::vector<Value> candidates = sm_->realize(state, *ins);
        if (candidates.empty()) continue;
        state.routes.push_back({ins, candidates[rng.index(candidates.size())]});
    }
    return state;
}

DeviceState Solver::max_state_search(const std::vector<const Instruction*>& layer,
                                     const Value& map, Rng& rng,
                                     const Deadline& deadline) const {
    if (layer.empty()) {
        DeviceState s;
        s.map = map;
        return s;
    }
    if (sm_->noninterfering() || layer.size() == 1) return route_one_pass(layer, map, rng);

    // Tiny layers: Alg. 3's argmax over all permutations, taken literally.
    if (layer.size() <= 5) {
        std::vector<std::size_t> order(layer.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        DeviceState best;
        double best_obj = -1.0;
        do {
            std::vector<const Instruction*> perm;
            perm.reserve(layer.size());
            for (std::size_t i : order) perm.push_back(layer[i]);
            DeviceState s = route_one_pass(perm, map, rng);
            double obj = objective(s);
            if (obj > best_obj) {
                best_obj = obj;
                best = std::move(s);
            }
            if (deadline.passed()) break;
        } while (std::next_permutation(order.begin(), order.end()));
        return best;
    }

    // Annealing over instruction orders: the main schedule plus the reduced
    // ladder, interleaved round-robin on this worker's thread.
    struct Sub {
        std::vector<const Instruction*> perm;
        DeviceState cur;
        double cur_obj = 0.0;
        double tau = 0.0;
        double rate = 0.0;
        long long steps_left = 0;
    };
    std::vector<const Instruction*> init = layer;
    std::sort(init.begin(), init.end(), [&](const Instruction* a, const Instruction* b) {
        int ca = crit_[static_cast<std::size_t>(a->index)];
        int cb = crit_[static_cast<std::size_t>(b->index)];
        if (ca != cb) return ca > cb;
        return a->index < b->index;
    });

    std::vector<double> rates = {cfg_.sa_map.rate};
    rates.insert(rates.end(), cfg_.reduced_rates.begin(), cfg_.reduced_rates.end());

    DeviceState best;
    double best_obj = -1.0;
    std::vector<Sub> subs;
    for (double rate : rates) {
        Sub sub;
        sub.perm = init;
        sub.cur = route_one_pass(sub.perm, map, rng);
        sub.cur_obj = objective(sub.cur);
        sub.tau = cfg_.sa_map.tau_i;
        sub.rate = rate;
        SaSchedule sched = cfg_.sa_map;
        sched.rate = rate;
        sub.steps_left = sa_step_count(sched);
        if (sub.cur_obj > best_obj) {
            best_obj = sub.cur_obj;
            best = sub.cur;
        }
        subs.push_back(std::move(sub));
    }

    bool live = true;
    while (live) {
        live = false;
        for (auto& sub : subs) {
            if (sub.steps_left <= 0) continue;
            if (deadline.passed()) return best;
            live = true;
            --sub.steps_left;
            std::size_t i = rng.index(sub.perm.size());
            std::size_t j = rng.index(sub.perm.size());
            if (i != j) {
                std::vector<const Instruction*> cand = sub.perm;
                std::swap(cand[i], cand[j]);
                DeviceState s = route_one_pass(cand, map, rng);
                double obj = objective(s);
                if (rng.unit() < sa_acceptance_probability(sub.cur_obj - obj, sub.tau)) {
                    sub.perm = std::move(cand);
                    sub.cur = s;
                    sub.cur_obj = obj;
                }
                if (obj > best_obj) {
                    best_obj = obj;
                    best = std::move(s);
                }
            }
            sub.tau *= 1.0 - sub.rate;
        }
    }
    return best;
}

bool Solver::map_within_locs(const Value& map) const {
    for (int l : map.as_qubit_map().locs)
        if (!sm_->loc_allowed(l)) return false;
    return true;
}

std::vector<const Instruction*> Solver::routable_front(const std::vector<int>& front) const {
    std::vector<const Instruction*> out;
    for (int idx : front) {
        const Instruction& ins = circuit_->instructions()[static_cast<std::size_t>(idx)];
        if (sm_->program().routes_gate(ins.gate)) out.push_back(&ins);
    }
    return out;
}

Solver::TransitionChoice Solver::select_transition(const DeviceState& state,
                                                   const std::vector<int>& front, Rng& rng,
                                                   const Deadline& deadline,
                                                   std::optional<Value>& fallback_origin,
                                                   bool routed_since_fallback) const {
    const EvalContext& ctx = sm_->ctx();
    std::vector<Value> options;
    std::vector<double> option_costs;
    sm_->transitions_with_costs(state, options, option_costs);
    std::vector<const Instruction*> next_layer = routable_front(front);
    bool has_attachable = next_layer.size() < front.size();

    struct Scored {
        Value trans;
        Value new_map;
        double cost;
        double obj;
        double score;
    };
    std::vector<Scored> scored;
    double best_obj = 0.0;
    for (std::size_t ti = 0; ti < options.size(); ++ti) {
        const Value& t = options[ti];
        Value new_map;
        try {
            new_map = call_apply(ctx, t, state.map);
        } catch (const EvalError&) {
            continue; // a transition the program cannot apply here
        }
        if (!map_within_locs(new_map)) continue;
        DeviceState inner = cfg_.transition_full_search
                                ? max_state_search(next_layer, new_map, rng, deadline)
                                : route_one_pass(next_layer, new_map, rng);
        double obj = objective(inner);
        double cost = option_costs[ti];
        best_obj = std::max(best_obj, obj);
        scored.push_back({t, std::move(new_map), cost, obj, obj - cost});
    }
    if (scored.empty()) // only IdTrans exists and even it failed; cannot happen in practice
        return {Value::id_trans(), state.map, call_cost(ctx, Value::id_trans()), false, true};

    if (best_obj > 0.0) {
        double best_score = -kInfCost;
        for (const auto& s : scored) best_score = std::max(best_score, s.score);
        std::vector<const Scored*> ties;
        for (const auto& s : scored)
            if (s.score == best_score) ties.push_back(&s);
        const Scored* pick = ties[rng.index(ties.size())];
        return {pick->trans, pick->new_map, pick->cost, false, false};
    }

    // No transition enables any gate. When the next layer still has
    // attachable instructions the identity makes progress for free.
    if (has_attachable) {
        for (const auto& s : scored)
            if (s.trans.is_id_trans()) return {s.trans, s.new_map, s.cost, false, false};
    }

    // Distance fallback over non-identity transitions: minimize the summed
    // distance between mapped qubits of front multi-qubit gates, excluding a
    // transition that just undoes the previous fallback move.
    auto sum_distance = [&](const Value& map) {
        const QubitMapData& m = map.as_qubit_map();
        double total = 0.0;
        for (const Instruction* ins : next_layer) {
            if (!ins->multi_qubit()) continue;
            for (std::size_t a = 0; a < ins->qubits.size(); ++a)
                for (std::size_t b = a + 1; b < ins->qubits.size(); ++b) {
                    int d = sm_->graph().distance(m.loc_of(ins->qubits[a]),
                                                  m.loc_of(ins->qubits[b]));
                    total += d == kInfDistance ? 1e18 : static_cast<double>(d);
                }
        }
        return total;
    };

    std::vector<const Scored*> candidates;
    for (const auto& s : scored) {
        if (s.trans.is_id_trans()) continue;
        if (!routed_since_fallback && fallback_origin &&
            values_equal(s.new_map, *fallback_origin))
            continue; // would exactly invert the previous fallback move
        candidates.push_back(&s);
    }
    if (candidates.empty()) {
        // all excluded: cost-minimal non-identity transition
        const Scored* pick = nullptr;
        for (const auto& s : scored) {
            if (s.trans.is_id_trans()) continue;
            if (!pick || s.cost < pick->cost) pick = &s;
        }
        if (!pick) { // no non-identity transitions at all: forced identity
            for (const auto& s : scored)
                if (s.trans.is_id_trans()) return {s.trans, s.new_map, s.cost, true, true};
            return {Value::id_trans(), state.map, call_cost(ctx, Value::id_trans()), true, true};
        }
        fallback_origin = state.map;
        return {pick->trans, pick->new_map, pick->cost, true, false};
    }
    double best_dist = kInfCost;
    for (const auto* s : candidates) best_dist = std::min(best_dist, sum_distance(s->new_map));
    std::vector<const Scored*> ties;
    for (const auto* s : candidates)
        if (sum_distance(s->new_map) == best_dist) ties.push_back(s);
    const Scored* pick = ties[rng.index(ties.size())];
    fallback_origin = state.map;
    return {pick->trans, pick->new_map, pick->cost, true, false};
}

std::optional<Solution> Solver::maxstate_run(const Value& initial_map, Rng& rng,
                                             const Deadline& deadline) const {
    // Incremental front layer over the dependency DAG.
    std::vector<int> blocked_preds(circuit_->size());
    std::vector<bool> done(circuit_->size(), false);
    std::set<int> front;
    for (const auto& ins : circuit_->instructions()) {
        blocked_preds[static_cast<std::size_t>(ins.index)] =
            static_cast<int>(circuit_->direct_preds(ins.index).size());
        if (blocked_preds[static_cast<std::size_t>(ins.index)] == 0) front.insert(ins.index);
    }
    auto remove_instr = [&](int idx) {
        done[static_cast<std::size_t>(idx)] = true;
        front.erase(idx);
        for (int s : circuit_->direct_succs(idx))
            if (--blocked_preds[static_cast<std::size_t>(s)] == 0 &&
                !done[static_cast<std::size_t>(s)])
                front.insert(s);
    };

    Solution sol;
    Value map = initial_map;
    std::size_t remaining = circuit_->size();
    std::optional<Value> fallback_origin;
    bool routed_since_fallback = true;
    const long long zero_cap = 1000 + 10LL * sm_->graph().n() * sm_->graph().n();
    long long zero_streak = 0;

    while (remaining > 0) {
        if (deadline.passed()) return std::nullopt; // partial runs are discarded

        std::vector<int> front_now(front.begin(), front.end());
        std::vector<const Instruction*> layer = routable_front(front_now);
        DeviceState state = max_state_search(layer, map, rng, deadline);

        SolutionStep step;
        std::vector<int> attach;
        for (int idx : front_now) {
            const Instruction& ins = circuit_->instructions()[static_cast<std::size_t>(idx)];
            if (!sm_->program().routes_gate(ins.gate)) attach.push_back(idx);
        }
        step.nonrouted = attach;

        std::size_t progress = state.routes.size() + attach.size();
        if (progress == 0) {
            if (++zero_streak > zero_cap) return std::nullopt;
        } else {
            zero_streak = 0;
            if (!state.routes.empty()) routed_since_fallback = true;
        }

        for (const auto& r : state.routes) remove_instr(r.instr->index);
        for (int idx : attach) remove_instr(idx);
        remaining -= progress;

        step.state_cost = call_state_cost(sm_->ctx(), sm_->state_value(state));

        if (remaining == 0) {
            step.state = std::move(state);
            step.transition = Value::id_trans();
            step.transition_cost = 0.0;
            sol.steps.push_back(std::move(step));
            break;
        }

        std::vector<int> next_front(front.begin(), front.end());
        TransitionChoice choice = select_transition(state, next_front, rng, deadline,
                                                    fallback_origin, routed_since_fallback);
        // Forced identity while nothing was placed: the next iteration would
        // repeat this one exactly.
        if (choice.stuck && progress == 0) return std::nullopt;
        if (choice.used_fallback) routed_since_fallback = false;
        step.state = std::move(state);
        step.transition = choice.trans;
        step.transition_cost = choice.cost;
        sol.steps.push_back(std::move(step));
        map = choice.new_map;
    }
    sol.total_cost = solution_cost(sol);
    return sol;
}

std::vector<int> Solver::random_injective_locs(Rng& rng) const {
    std::vector<int> pool = sm_->locs();
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.index(i)]);
    pool.resize(static_cast<std::size_t>(circuit_->qubit_count()));
    return pool;
}

std::vector<int> Solver::incremental_isomorphism() const {
    const auto& qubits = circuit_->qubits();
    const std::size_t nq = qubits.size();
    auto qpos = [&](int qubit) {
        return static_cast<std::size_t>(
            std::lower_bound(qubits.begin(), qubits.end(), qubit) - qubits.begin());
    };

    std::vector<std::vector<std::size_t>> iadj(nq);
    auto has_iedge = [&](std::size_t a, std::size_t b) {
        for (std::size_t x : iadj[a])
            if (x == b) return true;
        return false;
    };

    // Backtracking (non-induced) monomorphism into the Locs-induced subgraph.
    auto embed = [&]() -> std::optional<std::vector<int>> {
        std::vector<std::size_t> order;
        std::vector<bool> placed_in_order(nq, false);
        // connected expansion, seeded by highest degree
        for (std::size_t round = 0; round < nq; ++round) {
            std::size_t best = nq;
            bool best_connected = false;
            for (std::size_t v = 0; v < nq; ++v) {
                if (placed_in_order[v] || iadj[v].empty()) continue;
                bool connected = false;
                for (std::size_t u : iadj[v])
                    if (placed_in_order[u]) connected = true;
                if (best == nq || (connected && !best_connected) ||
                    (connected == best_connected && iadj[v].size() > iadj[best].size()))
                    if (connected || !best_connected || best == nq) {
                        if (best == nq || connected > best_connected ||
                            (connected == best_connected &&
                             iadj[v].size() > iadj[best].size())) {
                            best = v;
                            best_connected = connected;
                        }
                    }
            }
            if (best == nq) break;
            order.push_back(best);
            placed_in_order[best] = true;
        }
        std::vector<int> assignment(nq, -1);
        std::vector<bool> used(static_cast<std::size_t>(sm_->graph().n()), false);
        long long budget = 200000;
        auto rec = [&](auto&& self, std::size_t k) -> bool {
            if (k == order.size()) return true;
            if (--budget <= 0) return false;
            std::size_t v = order[k];
            for (int loc : sm_->locs()) {
                if (used[static_cast<std::size_t>(loc)]) continue;
                bool ok = true;
                for (std::size_t u : iadj[v]) {
                    if (assignment[u] < 0) continue;
                    if (!sm_->graph().has_edge(loc, assignment[u])) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                assignment[v] = loc;
                used[static_cast<std::size_t>(loc)] = true;
                if (self(self, k + 1)) return true;
                assignment[v] = -1;
                used[static_cast<std::size_t>(loc)] = false;
            }
            return false;
        };
        if (!rec(rec, 0)) return std::nullopt;
        return assignment;
    };

    std::vector<int> best(nq, -1);
    bool any = false;
    for (const auto& ins : circuit_->instructions()) {
        if (!ins.multi_qubit()) continue;
        bool grew = false;
        for (std::size_t a = 0; a < ins.qubits.size(); ++a)
            for (std::size_t b = a + 1; b < ins.qubits.size(); ++b) {
                std::size_t pa = qpos(ins.qubits[a]);
                std::size_t pb = qpos(ins.qubits[b]);
                if (!has_iedge(pa, pb)) {
                    iadj[pa].push_back(pb);
                    iadj[pb].push_back(pa);
                    grew = true;
                }
            }
        if (!grew) continue;
        auto found = embed();
        if (!found) break;
        best = *found;
        any = true;
    }

    // identity-order fallback, then extend over unplaced qubits
    std::vector<bool> used(static_cast<std::size_t>(sm_->graph().n()), false);
    if (!any) {
        std::vector<int> out;
        for (std::size_t i = 0; i < nq; ++i) out.push_back(sm_->locs()[i]);
        return out;
    }
    for (int l : best)
        if (l >= 0) used[static_cast<std::size_t>(l)] = true;
    for (std::size_t i = 0; i < nq; ++i) {
        if (best[i] >= 0) continue;
        for (int l : sm_->locs())
            if (!used[static_cast<std::size_t>(l)]) {
                best[i] = l;
                used[static_cast<std::size_t>(l)] = true;
                break;
            }
    }
    return best;
}

struct Solver::Shared {
    std::mutex mutex;
    bool found = false;
    Solution best;
    double best_cost = kInfCost;
    double wall_to_best = 0.0;
    std::vector<ConvergenceRecord> log;
    Clock::time_point t0;
};

double Solver::run_and_report(const Value& map, Rng& rng, const Deadline& deadline, int worker,
                              Shared& shared, WorkerStats& stats) const {
    std::optional<Solution> sol = maxstate_run(map, rng, deadline);
    ++stats.runs;
    if (!sol) return kInfCost;
    ++stats.solutions;
    double cost = sol->total_cost;
    if (!stats.found || cost < stats.best_cost) {
        stats.found = true;
        stats.best_cost = cost;
    }
    std::lock_guard<std::mutex> lock(shared.mutex);
    if (!shared.found || cost < shared.best_cost) {
        shared.found = true;
        shared.best_cost = cost;
        shared.best = std::move(*sol);
        shared.wall_to_best =
            std::chrono::duration<double>(Clock::now() - shared.t0).count();
        shared.log.push_back({shared.wall_to_best, worker, cost});
    }
    return cost;
}

// Simulated annealing over initial qubit maps; one full schedule per worker.
void Solver::run_schedule(int worker, Rng& rng, const Deadline& deadline, Shared& shared,
                          WorkerStats& stats) const {
    std::vector<int> start = (worker == 0 && cfg_.warm_start) ? incremental_isomorphism()
                                                              : random_injective_locs(rng);
    Value cur_map = make_qubit_map(*circuit_, start);
    double cur_cost = run_and_report(cur_map, rng, deadline, worker, shared, stats);

    const long long steps = sa_step_count(cfg_.sa_map);
    double tau = cfg_.sa_map.tau_i;
    const std::vector<int>& locs = sm_->locs();
    const std::size_t nq = static_cast<std::size_t>(circuit_->qubit_count());

    for (long long step = 0; step < steps; ++step) {
        if (deadline.passed()) break;
        QubitMapData m = cur_map.as_qubit_map();
        std::vector<bool> used(static_cast<std::size_t>(sm_->graph().n()), false);
        for (int l : m.locs) used[static_cast<std::size_t>(l)] = true;
        std::vector<int> unused;
        for (int l : locs)
            if (!used[static_cast<std::size_t>(l)]) unused.push_back(l);

        // neighbor move: swap two qubits or relocate one into an unused
        // location, uniform between available move types
        bool can_swap = nq >= 2;
        bool can_move = !unused.empty() && nq >= 1;
        if (!can_swap && !can_move) break;
        bool do_swap = can_swap && (!can_move || rng.index(2) == 0);
        std::vector<int> cand = m.locs;
        if (do_swap) {
            std::size_t a = rng.index(nq);
            std::size_t b = rng.index(nq - 1);
            if (b >= a) ++b;
            std::swap(cand[a], cand[b]);
        } else {
            std::size_t a = rng.index(nq);
            cand[a] = unused[rng.index(unused.size())];
        }
        Value cand_map = make_qubit_map(*circuit_, cand);
        double cand_cost = run_and_report(cand_map, rng, deadline, worker, shared, stats);
        double delta = cand_cost - cur_cost;
        bool accept;
        if (cand_cost == kInfCost && cur_cost == kInfCost)
            accept = true;
        else if (cand_cost == kInfCost)
            accept = false;
        else if (cur_cost == kInfCost)
            accept = true;
        else
            accept = rng.unit() < sa_acceptance_probability(delta, tau);
        if (accept) {
            cur_map = std::move(cand_map);
            cur_cost = cand_cost;
        }
        tau *= 1.0 - cfg_.sa_map.rate;
    }
}

SolveResult Solver::solve() const {
    Shared shared;
    shared.t0 = Clock::now();
    Deadline deadline{shared.t0 + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(cfg_.timeout_seconds)),
                      cfg_.stop_flag};

    int jobs = std::max(1, cfg_.jobs);
    std::vector<WorkerStats> all_stats(static_cast<std::size_t>(jobs));

    auto body = [&](int worker) {
        Rng rng(cfg_.seed, worker);
        WorkerStats stats;
        stats.worker = worker;
        if (cfg_.fixed_map) {
            // Fixed-map mode: a single deterministic run on worker 0.
            if (worker == 0)
                run_and_report(make_qubit_map(*circuit_, *cfg_.fixed_map), rng, deadline, worker,
                               shared, stats);
        } else {
            run_schedule(worker, rng, deadline, shared, stats);
        }
        all_stats[static_cast<std::size_t>(worker)] = stats;
    };

    if (jobs == 1) {
        body(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < jobs; ++w) threads.emplace_back(body, w);
        for (auto& t : threads) t.join();
    }

    SolveResult result;
    result.found = shared.found;
    result.best = std::move(shared.best);
    result.best_cost = shared.found ? shared.best_cost : 0.0;
    result.wall_to_best = shared.wall_to_best;
    result.wall_total = std::chrono::duration<double>(Clock::now() - shared.t0).count();
    result.log = std::move(shared.log);
    result.workers = std::move(all_stats);
    return result;
}

}  // namespace marol
