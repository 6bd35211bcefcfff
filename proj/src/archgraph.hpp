#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace marol {

// Enumeration bounds for all_paths/steiner_trees. Exact enumeration is
// exponential; the solver only needs a diverse candidate pool.
struct PathBounds {
    int max_paths = 256;        // per all_paths call
    int path_length_slack = 4;  // edge budget = min(2*dist + slack, n-1)
    int max_trees = 64;         // per steiner_trees call
    int max_orderings = 5040;   // terminal orderings tried before sampling
};

constexpr int kInfDistance = std::numeric_limits<int>::max();

// Labeled QPU graph: locations 0..n-1 plus undirected edges. Label and field
// payloads (per the program's ArchInfo declaration) are attached at load time
// by arch_io. Immutable after construction; the all-pairs BFS distance table
// is built eagerly so concurrent readers never race.
class ArchGraph {
public:
    ArchGraph() = default;
    ArchGraph(int n, std::vector<std::pair<int, int>> edges);

    int n() const { return n_; }
    // Lexicographic (u, v) with u < v, both orientations not duplicated.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    bool has_edge(int u, int v) const;

    // Unweighted hop count; kInfDistance when disconnected.
    int distance(int u, int v) const;

    // Simple paths from any source to any target avoiding blocked vertices,
    // enumerated by increasing length, deterministic, truncated per bounds.
    std::vector<std::vector<int>> all_paths(const std::vector<int>& sources,
                                            const std::vector<int>& targets,
                                            const std::vector<int>& blocked,
                                            const PathBounds& bounds) const;

    // Candidate connected vertex sets containing all terminals and avoiding
    // blocked vertices, ordered by vertex count. Shortest-path-heuristic
    // construction over terminal orderings plus 1-vertex prunes.
    std::vector<std::vector<int>> steiner_trees(const std::vector<int>& terminals,
                                                const std::vector<int>& blocked,
                                                const PathBounds& bounds) const;

private:
    void check_vertex(int v) const;

    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> dist_; // all-pairs BFS, built in constructor
};

// Row-major grid helpers exposed to Marol programs.
std::pair<int, int> grid_to_2d(int loc, int width);
std::vector<int> grid_horizontal_neighbors(int loc, int width);
std::vector<int> grid_vertical_neighbors(int loc, int width, int height);

}  // namespace marol
