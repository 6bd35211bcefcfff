#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace marol {

// A bundled, versioned problem definition. Sources are embedded verbatim and
// mirrored under problems/ in the repository.
struct ProblemBundle {
    std::string name;
    std::string source;
    std::string doc;
    bool noninterfering = false; // documented expectation, checked by tests
};

const ProblemBundle& builtin_problem(const std::string& name); // throws LoadError
const std::vector<ProblemBundle>& builtin_problems();

// Deterministic arch generators (JSON text, schema of arch files).
//   line(n)                 p1 = n
//   grid(w, h)              p1 = w, p2 = h
//   compact(n)              p1 = circuit qubit capacity
//   compact_magic_column(w, h)  grid plus a column of magic-state cells
std::string gen_arch(const std::string& kind, int p1, int p2);

// Adds per-edge error rates p ~ U[1e-3, 1e-1] to an arch file: fields
// edge_cost[u][v] = -log(1 - p) and edge_error_rate[u][v] = p.
std::string gen_ve_errors(const std::string& arch_json, std::uint64_t seed);

}  // namespace marol
