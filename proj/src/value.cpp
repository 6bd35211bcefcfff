#include "value.hpp"

#include <algorithm>
#include <cmath>

#include "diagnostics.hpp"

namespace marol {

int QubitMapData::loc_of(int qubit) const {
    auto it = std::lower_bound(qubit_ids->begin(), qubit_ids->end(), qubit);
    if (it == qubit_ids->end() || *it != qubit)
        throw EvalError("qubit map: unknown qubit " + std::to_string(qubit));
    return locs[static_cast<std::size_t>(it - qubit_ids->begin())];
}

int QubitMapData::qubit_at(int loc) const {
    for (std::size_t i = 0; i < locs.size(); ++i)
        if (locs[i] == loc) return (*qubit_ids)[i];
    return -1;
}

const Value* ArchData::field(const std::string& name) const {
    for (const auto& [n, v] : fields)
        if (n == name) return &v;
    return nullptr;
}

const Value* StructData::field(const std::string& name) const {
    for (const auto& [n, v] : fields)
        if (n == name) return &v;
    return nullptr;
}

Value Value::integer(long long v) {
    Value out;
    out.kind_ = ValueKind::Int;
    out.int_ = v;
    return out;
}

Value Value::real(double v) {
    Value out;
    out.kind_ = ValueKind::Float;
    out.float_ = v;
    return out;
}

Value Value::boolean(bool v) {
    Value out;
    out.kind_ = ValueKind::Bool;
    out.int_ = v ? 1 : 0;
    return out;
}

Value Value::str(std::string v) {
    Value out;
    out.kind_ = ValueKind::Str;
    out.payload_ = std::make_shared<const std::string>(std::move(v));
    return out;
}

Value Value::loc(int v) {
    Value out;
    out.kind_ = ValueKind::Loc;
    out.int_ = v;
    return out;
}

Value Value::qubit(int v) {
    Value out;
    out.kind_ = ValueKind::Qubit;
    out.int_ = v;
    return out;
}

Value Value::pair(Value a, Value b) {
    Value out;
    out.kind_ = ValueKind::Pair;
    out.payload_ = std::make_shared<const std::pair<Value, Value>>(std::move(a), std::move(b));
    return out;
}

Value Value::list(std::vector<Value> elems) {
    Value out;
    out.kind_ = ValueKind::List;
    out.payload_ = std::make_shared<const std::vector<Value>>(std::move(elems));
    return out;
}

Value Value::strct(std::string name, std::vector<std::pair<std::string, Value>> fields) {
    Value out;
    out.kind_ = ValueKind::Struct;
    out.payload_ =
        std::make_shared<const StructData>(StructData{std::move(name), std::move(fields)});
    return out;
}

Value Value::closure(const Expr* lambda, std::vector<std::pair<std::string, Value>> captured) {
    Value out;
    out.kind_ = ValueKind::Closure;
    out.payload_ = std::make_shared<const ClosureData>(ClosureData{lambda, std::move(captured)});
    return out;
}

Value Value::qubit_map(QubitMapData data) {
    Value out;
    out.kind_ = ValueKind::QubitMap;
    out.payload_ = std::make_shared<const QubitMapData>(std::move(data));
    return out;
}

Value Value::id_trans() {
    Value out;
    out.kind_ = ValueKind::IdTrans;
    return out;
}

Value Value::arch(std::shared_ptr<const ArchData> data) {
    Value out;
    out.kind_ = ValueKind::ArchH;
    out.payload_ = std::move(data);
    return out;
}

Value Value::instr(std::shared_ptr<const InstrData> data) {
    Value out;
    out.kind_ = ValueKind::InstrH;
    out.payload_ = std::move(data);
    return out;
}

Value Value::state(std::shared_ptr<const Value> map,
                   std::shared_ptr<const std::vector<Value>> route) {
    Value out;
    out.kind_ = ValueKind::StateH;
    out.payload_ = std::make_shared<const StateData>(StateData{std::move(map), std::move(route)});
    return out;
}

namespace {
[[noreturn]] void bad_kind(const char* want, const Value& v) {
    throw EvalError(std::string("expected ") + want + ", found " + v.describe());
}
} // namespace

long long Value::as_int() const {
    if (kind_ != ValueKind::Int) bad_kind("Int", *this);
    return int_;
}

double Value::as_float() const {
    if (kind_ != ValueKind::Float) bad_kind("Float", *this);
    return float_;
}

bool Value::as_bool() const {
    if (kind_ != ValueKind::Bool) bad_kind("Bool", *this);
    return int_ != 0;
}

const std::string& Value::as_str() const {
    if (kind_ != ValueKind::Str) bad_kind("String", *this);
    return payload<std::string>();
}

int Value::as_loc() const {
    if (kind_ != ValueKind::Loc) bad_kind("Loc", *this);
    return static_cast<int>(int_);
}

int Value::as_qubit() const {
    if (kind_ != ValueKind::Qubit) bad_kind("Qubit", *this);
    return static_cast<int>(int_);
}

const std::pair<Value, Value>& Value::as_pair() const {
    if (kind_ != ValueKind::Pair) bad_kind("pair", *this);
    return payload<std::pair<Value, Value>>();
}

const std::vector<Value>& Value::as_list() const {
    if (kind_ != ValueKind::List) bad_kind("list", *this);
    return payload<std::vector<Value>>();
}

const StructData& Value::as_struct() const {
    if (kind_ != ValueKind::Struct) bad_kind("struct", *this);
    return payload<StructData>();
}

const ClosureData& Value::as_closure() const {
    if (kind_ != ValueKind::Closure) bad_kind("function", *this);
    return payload<ClosureData>();
}

const QubitMapData& Value::as_qubit_map() const {
    if (kind_ != ValueKind::QubitMap) bad_kind("QubitMap", *this);
    return payload<QubitMapData>();
}

const ArchData& Value::as_arch() const {
    if (kind_ != ValueKind::ArchH) bad_kind("Arch", *this);
    return payload<ArchData>();
}

const InstrData& Value::as_instr() const {
    if (kind_ != ValueKind::InstrH) bad_kind("Instr", *this);
    return payload<InstrData>();
}

const Value& Value::state_map() const {
    if (kind_ != ValueKind::StateH) bad_kind("State", *this);
    return *payload<StateData>().map;
}

const std::vector<Value>& Value::state_route() const {
    if (kind_ != ValueKind::StateH) bad_kind("State", *this);
    return *payload<StateData>().route;
}

std::string Value::describe() const {
    switch (kind_) {
        case ValueKind::Int: return "Int(" + std::to_string(int_) + ")";
        case ValueKind::Float: return "Float(" + std::to_string(float_) + ")";
        case ValueKind::Bool: return int_ ? "Bool(true)" : "Bool(false)";
        case ValueKind::Str: return "\"" + payload<std::string>() + "\"";
        case ValueKind::Loc: return "loc(" + std::to_string(int_) + ")";
        case ValueKind::Qubit: return "qubit(" + std::to_string(int_) + ")";
        case ValueKind::Pair: return "pair";
        case ValueKind::List:
            return "list[" + std::to_string(payload<std::vector<Value>>().size()) + "]";
        case ValueKind::Struct: return payload<StructData>().name + "{...}";
        case ValueKind::Closure: return "closure";
        case ValueKind::QubitMap: return "QubitMap";
        case ValueKind::IdTrans: return "IdTrans";
        case ValueKind::ArchH: return "Arch";
        case ValueKind::InstrH: {
            const auto& d = payload<InstrData>();
            return d.instr ? "Instr(" + d.instr->gate + ")" : "Instr";
        }
        case ValueKind::StateH: return "State";
    }
    return "?";
}

bool values_equal(const Value& a, const Value& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ValueKind::Int: return a.as_int() == b.as_int();
        case ValueKind::Float: return a.as_float() == b.as_float();
        case ValueKind::Bool: return a.as_bool() == b.as_bool();
        case ValueKind::Str: return a.as_str() == b.as_str();
        case ValueKind::Loc: return a.as_loc() == b.as_loc();
        case ValueKind::Qubit: return a.as_qubit() == b.as_qubit();
        case ValueKind::Pair:
            return values_equal(a.as_pair().first, b.as_pair().first) &&
                   values_equal(a.as_pair().second, b.as_pair().second);
        case ValueKind::List: {
            const auto& la = a.as_list();
            const auto& lb = b.as_list();
            if (la.size() != lb.size()) return false;
            for (std::size_t i = 0; i < la.size(); ++i)
                if (!values_equal(la[i], lb[i])) return false;
            return true;
        }
        case ValueKind::Struct: {
            const auto& sa = a.as_struct();
            const auto& sb = b.as_struct();
            if (sa.name != sb.name || sa.fields.size() != sb.fields.size()) return false;
            for (std::size_t i = 0; i < sa.fields.size(); ++i) {
                if (sa.fields[i].first != sb.fields[i].first ||
                    !values_equal(sa.fields[i].second, sb.fields[i].second))
                    return false;
            }
            return true;
        }
        case ValueKind::Closure: {
            const auto& ca = a.as_closure();
            const auto& cb = b.as_closure();
            if (ca.lambda != cb.lambda || ca.captured.size() != cb.captured.size()) return false;
            for (std::size_t i = 0; i < ca.captured.size(); ++i) {
                if (ca.captured[i].first != cb.captured[i].first ||
                    !values_equal(ca.captured[i].second, cb.captured[i].second))
                    return false;
            }
            return true;
        }
        case ValueKind::QubitMap: {
            const auto& ma = a.as_qubit_map();
            const auto& mb = b.as_qubit_map();
            return *ma.qubit_ids == *mb.qubit_ids && ma.locs == mb.locs;
        }
        case ValueKind::IdTrans: return true;
        case ValueKind::ArchH: return a.as_arch().graph == b.as_arch().graph;
        case ValueKind::InstrH: {
            const auto& ia = a.as_instr();
            const auto& ib = b.as_instr();
            if (ia.instr->index != ib.instr->index) return false;
            if (!ia.realization != !ib.realization) return false;
            return !ia.realization || values_equal(*ia.realization, *ib.realization);
        }
        case ValueKind::StateH: {
            if (!values_equal(a.state_map(), b.state_map())) return false;
            const auto& ra = a.state_route();
            const auto& rb = b.state_route();
            if (ra.size() != rb.size()) return false;
            for (std::size_t i = 0; i < ra.size(); ++i)
                if (!values_equal(ra[i], rb[i])) return false;
            return true;
        }
    }
    return false;
}

}  // namespace marol
