#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace marol {

// A gate applied to an ordered list of circuit qubits. `index` is the
// instruction's position in the circuit.
struct Instruction {
    int index = 0;
    std::string gate;        // canonical lowercase form
    std::vector<int> qubits; // non-empty, no duplicates

    bool multi_qubit() const { return qubits.size() > 1; }
};

// An indexed instruction sequence plus the direct-dependency structure the
// solver and validator consume. Immutable after construction; dependency is
// kept as per-qubit predecessor/successor links (the transitive reduction),
// which induces the same partial order as the all-overlapping-pairs relation.
class Circuit {
public:
    Circuit() = default;
    explicit Circuit(std::vector<Instruction> instructions);

    const std::vector<Instruction>& instructions() const { return instructions_; }
    std::size_t size() const { return instructions_.size(); }
    bool empty() const { return instructions_.empty(); }

    // Distinct qubit ids, ascending.
    const std::vector<int>& qubits() const { return qubits_; }
    int qubit_count() const { return static_cast<int>(qubits_.size()); }

    const std::vector<int>& direct_preds(int index) const { return preds_[index]; }
    const std::vector<int>& direct_succs(int index) const { return succs_[index]; }

    // True iff instruction `b` depends on `a` (transitively).
    bool depends(int a, int b) const;

    // Remaining instructions whose direct predecessors are all in `removed`.
    // `removed` must be downward-closed under dependency.
    std::vector<int> front_layer(const std::set<int>& removed) const;

    // criticality(g) = length of the longest dependency chain starting at g,
    // counting g itself. Reverse-topological DP over direct successors.
    std::vector<int> criticality() const;

private:
    std::vector<Instruction> instructions_;
    std::vector<int> qubits_;
    std::vector<std::vector<int>> preds_;
    std::vector<std::vector<int>> succs_;
};

// Parses the line-based circuit format: one `<gate> <qubit> [<qubit> ...]`
// per line, `#` comments, blank lines ignored. Gate names are lowercased.
Circuit parse_circuit(const std::string& text);

}  // namespace marol
