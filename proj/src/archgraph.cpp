#include "archgraph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "diagnostics.hpp"

namespace marol {

ArchGraph::ArchGraph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 0) throw LoadError("arch: negative location count");
    adj_.assign(n_, {});
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n_ || v < 0 || v >= n_)
            throw LoadError("arch: edge endpoint out of range: (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
        if (u == v) throw LoadError("arch: self-loop at location " + std::to_string(u));
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second)
            throw LoadError("arch: duplicate edge (" + std::to_string(u) + "," +
                            std::to_string(v) + ")");
    }
    edges_.assign(seen.begin(), seen.end());
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());

    // Eager all-pairs BFS; transition selection evaluates distance in an
    // inner loop.
    dist_.assign(n_, std::vector<int>(n_, kInfDistance));
    for (int s = 0; s < n_; ++s) {
        auto& d = dist_[s];
        d[s] = 0;
        std::deque<int> queue = {s};
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            for (int nb : adj_[cur]) {
                if (d[nb] == kInfDistance) {
                    d[nb] = d[cur] + 1;
                    queue.push_back(nb);
                }
            }
        }
    }
}

void ArchGraph::check_vertex(int v) const {
    if (v < 0 || v >= n_)
        throw EvalError("location " + std::to_string(v) + " out of range (n=" +
                        std::to_string(n_) + ")");
}

bool ArchGraph::has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
}

int ArchGraph::distance(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return dist_[u][v];
}

namespace {

// Depth-limited DFS emitting simple paths in deterministic order.
struct PathSearch {
    const ArchGraph* g;
    const std::vector<bool>* is_target;
    const std::vector<bool>* is_blocked;
    int max_edges;
    int want_edges; // emit only paths with exactly this many edges
    int cap;
    std::vector<std::vector<int>>* out;
    std::vector<int> path;
    std::vector<bool> on_path;

    bool dfs(int v) {
        path.push_back(v);
        on_path[v] = true;
        const int edges = static_cast<int>(path.size()) - 1;
        if (edges == want_edges) {
            if ((*is_target)[v]) {
                out->push_back(path);
                if (static_cast<int>(out->size()) >= cap) return false;
            }
        } else {
            for (int nb : g->neighbors(v)) {
                if (on_path[nb] || (*is_blocked)[nb]) continue;
                if (!dfs(nb)) return false;
            }
        }
        on_path[v] = false;
        path.pop_back();
        return true;
    }
};

} // namespace

std::vector<std::vector<int>> ArchGraph::all_paths(const std::vector<int>& sources,
                                                   const std::vector<int>& targets,
                                                   const std::vector<int>& blocked,
                                                   const PathBounds& bounds) const {
    for (int v : sources) check_vertex(v);
    for (int v : targets) check_vertex(v);
    for (int v : blocked) check_vertex(v);
    if (n_ == 0 || sources.empty() || targets.empty()) return {};

    std::vector<bool> is_target(n_, false), is_blocked(n_, false);
    for (int t : targets) is_target[t] = true;
    for (int b : blocked) is_blocked[b] = true;

    std::vector<int> src = sources;
    std::sort(src.begin(), src.end());
    src.erase(std::unique(src.begin(), src.end()), src.end());

    int min_dist = kInfDistance;
    for (int s : src)
        for (int t : targets) min_dist = std::min(min_dist, distance(s, t));
    if (min_dist == kInfDistance) return {};

    int max_edges = n_ - 1;
    if (min_dist <= (max_edges - bounds.path_length_slack) / 2)
        max_edges = 2 * min_dist + bounds.path_length_slack;

    std::vector<std::vector<int>> out;
    // Iterative deepening: all paths of k edges before any of k+1.
    for (int k = 0; k <= max_edges; ++k) {
        PathSearch search{this,  &is_target, &is_blocked, max_edges, k,
                          bounds.max_paths, &out,       {},          std::vector<bool>(n_, false)};
        for (int s : src) {
            if (is_blocked[s]) continue;
            if (!search.dfs(s)) return out;
        }
    }
    return out;
}

namespace {

// Deterministic permutation sampler for terminal orderings beyond the
// exhaustive budget (plain xorshift; no cross-call state).
struct MiniRng {
    std::uint64_t s;
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
};

} // namespace

std::vector<std::vector<int>> ArchGraph::steiner_trees(const std::vector<int>& terminals,
                                                       const std::vector<int>& blocked,
                                                       const PathBounds& bounds) const {
    if (terminals.empty()) throw EvalError("steiner_trees: empty terminal list");
    for (int v : terminals) check_vertex(v);
    for (int v : blocked) check_vertex(v);

    std::vector<bool> is_blocked(n_, false);
    for (int b : blocked) is_blocked[b] = true;
    for (int t : terminals)
        if (is_blocked[t]) return {};

    std::vector<int> terms = terminals;
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    // BFS from `tree` to the nearest copy of `goal`, avoiding blocked cells.
    auto connect = [&](const std::vector<bool>& in_tree, int goal) -> std::vector<int> {
        std::vector<int> parent(n_, -2);
        std::deque<int> queue;
        for (int v = 0; v < n_; ++v)
            if (in_tree[v]) {
                parent[v] = -1;
                queue.push_back(v);
            }
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            if (cur == goal) {
                std::vector<int> path;
                for (int v = goal; v != -1; v = parent[v] >= 0 ? parent[v] : -1) {
                    path.push_back(v);
                    if (parent[v] == -1) break;
                }
                return path;
            }
            for (int nb : adj_[cur]) {
                if (parent[nb] != -2 || is_blocked[nb]) continue;
                parent[nb] = cur;
                queue.push_back(nb);
            }
        }
        return {};
    };

    auto grow = [&](const std::vector<int>& order) -> std::vector<int> {
        std::vector<bool> in_tree(n_, false);
        in_tree[order[0]] = true;
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (in_tree[order[i]]) continue;
            auto path = connect(in_tree, order[i]);
            if (path.empty()) return {};
            for (int v : path) in_tree[v] = true;
        }
        std::vector<int> vertices;
        for (int v = 0; v < n_; ++v)
            if (in_tree[v]) vertices.push_back(v);
        return vertices;
    };

    // Drop non-terminal vertices whose removal keeps the terminals connected.
    auto prune = [&](std::vector<int> vertices) -> std::vector<int> {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < vertices.size(); ++i) {
                int v = vertices[i];
                if (std::binary_search(terms.begin(), terms.end(), v)) continue;
                std::vector<int> rest;
                for (int u : vertices)
                    if (u != v) rest.push_back(u);
                std::vector<bool> keep(n_, false);
                for (int u : rest) keep[u] = true;
                // connectivity of `rest` restricted to kept vertices
                std::deque<int> queue = {terms[0]};
                std::vector<bool> seen(n_, false);
                seen[terms[0]] = true;
                int reached = 1;
                while (!queue.empty()) {
                    int cur = queue.front();
                    queue.pop_front();
                    for (int nb : adj_[cur])
                        if (keep[nb] && !seen[nb]) {
                            seen[nb] = true;
                            ++reached;
                            queue.push_back(nb);
                        }
                }
                bool ok = reached == static_cast<int>(rest.size());
                for (int t : terms) ok = ok && seen[t];
                if (ok) {
                    vertices = rest;
                    changed = true;
                    break;
                }
            }
        }
        return vertices;
    };

    std::set<std::vector<int>> unique_trees;
    std::vector<int> order(terms);
    long long total_orders = 1;
    for (std::size_t i = 2; i <= terms.size() && total_orders <= bounds.max_orderings; ++i)
        total_orders *= static_cast<long long>(i);

    auto consider = [&](const std::vector<int>& o) {
        auto tree = grow(o);
        if (tree.empty()) return;
        unique_trees.insert(prune(std::move(tree)));
    };

    if (total_orders <= bounds.max_orderings) {
        std::sort(order.begin(), order.end());
        do {
            consider(order);
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        MiniRng rng{0x9E3779B97F4A7C15ull};
        for (int i = 0; i < bounds.max_orderings; ++i) {
            std::vector<int> o = terms;
            for (std::size_t j = o.size(); j > 1; --j)
                std::swap(o[j - 1], o[rng.next() % j]);
            consider(o);
        }
    }

    std::vector<std::vector<int>> out(unique_trees.begin(), unique_trees.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (static_cast<int>(out.size()) > bounds.max_trees) out.resize(bounds.max_trees);
    return out;
}

std::pair<int, int> grid_to_2d(int loc, int width) {
    if (width <= 0) throw EvalError("to_2d: non-positive width");
    if (loc < 0) throw EvalError("to_2d: negative location");
    return {loc / width, loc % width};
}

std::vector<int> grid_horizontal_neighbors(int loc, int width) {
    if (width <= 0) throw EvalError("horizontal_neighbors: non-positive width");
    if (loc < 0) throw EvalError("horizontal_neighbors: negative location");
    std::vector<int> out;
    int col = loc % width;
    if (col > 0) out.push_back(loc - 1);
    if (col < width - 1) out.push_back(loc + 1);
    return out;
}

std::vector<int> grid_vertical_neighbors(int loc, int width, int height) {
    if (width <= 0 || height <= 0)
        throw EvalError("vertical_neighbors: non-positive dimensions");
    if (loc < 0 || loc >= width * height)
        throw EvalError("vertical_neighbors: location " + std::to_string(loc) + " out of range");
    std::vector<int> out;
    int row = loc / width;
    if (row > 0) out.push_back(loc - width);
    if (row < height - 1) out.push_back(loc + width);
    return out;
}

}  // namespace marol
