#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "archgraph.hpp"
#include "ast.hpp"
#include "circuit.hpp"

namespace marol {

class Value;

// Injective total map over the circuit's qubits. `qubit_ids` is shared with
// the circuit (sorted ascending); locs[i] is the location of qubit_ids[i].
struct QubitMapData {
    std::shared_ptr<const std::vector<int>> qubit_ids;
    std::vector<int> locs;

    int loc_of(int qubit) const;       // throws EvalError on unknown qubit
    int qubit_at(int loc) const;       // -1 when the location is unused
};

// Arch value: graph plus the decoded ArchInfo field payloads.
struct ArchData {
    const ArchGraph* graph = nullptr;
    std::vector<std::pair<std::string, Value>> fields;

    const Value* field(const std::string& name) const;
};

// An instruction handle. Inside State.route it also carries the chosen
// realization, whose struct fields are reachable through field access.
struct InstrData {
    const Instruction* instr = nullptr;
    std::shared_ptr<const Value> realization; // null outside State.route
};

struct StructData {
    std::string name;
    std::vector<std::pair<std::string, Value>> fields; // declaration order
    const Value* field(const std::string& name) const;
};

struct ClosureData {
    const Expr* lambda = nullptr;
    std::vector<std::pair<std::string, Value>> captured;
};

enum class ValueKind {
    Int, Float, Bool, Str, Loc, Qubit,
    Pair, List, Struct, Closure, QubitMap, IdTrans,
    ArchH, InstrH, StateH,
};

class Value {
public:
    Value() : kind_(ValueKind::Int) {}

    static Value integer(long long v);
    static Value real(double v);
    static Value boolean(bool v);
    static Value str(std::string v);
    static Value loc(int v);
    static Value qubit(int v);
    static Value pair(Value a, Value b);
    static Value list(std::vector<Value> elems);
    static Value strct(std::string name, std::vector<std::pair<std::string, Value>> fields);
    static Value closure(const Expr* lambda, std::vector<std::pair<std::string, Value>> captured);
    static Value qubit_map(QubitMapData data);
    static Value id_trans();
    static Value arch(std::shared_ptr<const ArchData> data);
    static Value instr(std::shared_ptr<const InstrData> data);
    static Value state(std::shared_ptr<const Value> map,
                       std::shared_ptr<const std::vector<Value>> route);

    ValueKind kind() const { return kind_; }

    long long as_int() const;
    double as_float() const;
    bool as_bool() const;
    const std::string& as_str() const;
    int as_loc() const;
    int as_qubit() const;
    const std::pair<Value, Value>& as_pair() const;
    const std::vector<Value>& as_list() const;
    const StructData& as_struct() const;
    const ClosureData& as_closure() const;
    const QubitMapData& as_qubit_map() const;
    const ArchData& as_arch() const;
    const InstrData& as_instr() const;
    const Value& state_map() const;
    const std::vector<Value>& state_route() const;

    bool is_id_trans() const { return kind_ == ValueKind::IdTrans; }

    std::string describe() const; // short form for diagnostics

private:
    struct StateData {
        std::shared_ptr<const Value> map;
        std::shared_ptr<const std::vector<Value>> route;
    };

    // One payload pointer keeps copies cheap; scalars live inline.
    ValueKind kind_;
    long long int_ = 0;
    double float_ = 0.0;
    std::shared_ptr<const void> payload_;

    template <typename T>
    const T& payload() const {
        return *static_cast<const T*>(payload_.get());
    }
};

// Structural equality on every value form.
bool values_equal(const Value& a, const Value& b);

}  // namespace marol
