#pragma once

#include "statemachine.hpp"

namespace marol {

struct OracleBounds {
    int max_qubits = 4;
    int max_locs = 5;
    int max_instructions = 8;
    int max_transitions = 8;       // program transitions per state
    long long max_states_per_node = 20000;
};

// Exact minimum solution cost by uniform-cost search over (qubit map,
// executed set) nodes, expanding every derivable state over front-layer
// subsets and every transition. Throws LoadError when bounds are exceeded
// or no solution exists.
double brute_force_oracle(const StateMachine& sm, const Circuit& circuit,
                          const OracleBounds& bounds = {});

}  // namespace marol
