#include "circuit.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "diagnostics.hpp"

namespace marol {

Circuit::Circuit(std::vector<Instruction> instructions)
    : instructions_(std::move(instructions)) {
    const std::size_t n = instructions_.size();
    preds_.assign(n, {});
    succs_.assign(n, {});

    std::set<int> qubit_set;
    std::unordered_map<int, int> last_on_qubit; // qubit id -> latest instruction index
    for (std::size_t i = 0; i < n; ++i) {
        instructions_[i].index = static_cast<int>(i);
        std::vector<int> ps;
        for (int q : instructions_[i].qubits) {
            qubit_set.insert(q);
            auto it = last_on_qubit.find(q);
            if (it != last_on_qubit.end()) ps.push_back(it->second);
            last_on_qubit[q] = static_cast<int>(i);
        }
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        preds_[i] = ps;
        for (int p : ps) succs_[p].push_back(static_cast<int>(i));
    }
    for (auto& s : succs_) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    qubits_.assign(qubit_set.begin(), qubit_set.end());
}

bool Circuit::depends(int a, int b) const {
    if (a >= b) return false;
    // DFS over direct successors of a, pruning indices beyond b.
    std::vector<int> stack = {a};
    std::vector<bool> seen(instructions_.size(), false);
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (int s : succs_[cur]) {
            if (s > b || seen[s]) continue;
            if (s == b) return true;
            seen[s] = true;
            stack.push_back(s);
        }
    }
    return false;
}

std::vector<int> Circuit::front_layer(const std::set<int>& removed) const {
    std::vector<int> layer;
    for (const auto& ins : instructions_) {
        if (removed.count(ins.index)) continue;
        bool ready = true;
        for (int p : preds_[ins.index]) {
            if (!removed.count(p)) {
                ready = false;
                break;
            }
        }
        if (ready) layer.push_back(ins.index);
    }
    return layer;
}

std::vector<int> Circuit::criticality() const {
    std::vector<int> crit(instructions_.size(), 1);
    for (int i = static_cast<int>(instructions_.size()) - 1; i >= 0; --i) {
        for (int s : succs_[i]) crit[i] = std::max(crit[i], 1 + crit[s]);
    }
    return crit;
}

Circuit parse_circuit(const std::string& text) {
    std::vector<Instruction> instructions;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string gate;
        if (!(ls >> gate)) continue; // blank
        std::transform(gate.begin(), gate.end(), gate.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        Instruction ins;
        ins.gate = gate;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                int q = std::stoi(tok, &used);
                if (used != tok.size() || q < 0) throw std::invalid_argument(tok);
                ins.qubits.push_back(q);
            } catch (const std::exception&) {
                throw ParseError({lineno, 1}, "malformed qubit id '" + tok + "'");
            }
        }
        if (ins.qubits.empty())
            throw ParseError({lineno, 1}, "instruction '" + gate + "' has no qubits");
        std::vector<int> sorted = ins.qubits;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ParseError({lineno, 1}, "duplicate qubit in instruction '" + gate + "'");
        instructions.push_back(std::move(ins));
    }
    return Circuit(std::move(instructions));
}

}  // namespace marol
