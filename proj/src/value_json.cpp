#include "value_json.hpp"

#include "diagnostics.hpp"

namespace marol {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json encode_value(const Value& v) {
    switch (v.kind()) {
        case ValueKind::Int: return v.as_int();
        case ValueKind::Float: return v.as_float();
        case ValueKind::Bool: return v.as_bool();
        case ValueKind::Str: return v.as_str();
        case ValueKind::Loc: return v.as_loc();
        case ValueKind::Qubit: return v.as_qubit();
        case ValueKind::Pair:
            return ordered_json::array({encode_value(v.as_pair().first),
                                        encode_value(v.as_pair().second)});
        case ValueKind::List: {
            ordered_json arr = ordered_json::array();
            for (const auto& e : v.as_list()) arr.push_back(encode_value(e));
            return arr;
        }
        case ValueKind::Struct: {
            ordered_json obj;
            obj["$struct"] = v.as_struct().name;
            for (const auto& [name, fv] : v.as_struct().fields) obj[name] = encode_value(fv);
            return obj;
        }
        case ValueKind::IdTrans: return "id";
        default:
            throw EvalError("cannot encode " + v.describe() + " as JSON");
    }
}

Value decode_value(const json& j, const Type& type, const MarolProgram& program,
                   const std::string& where) {
    switch (type.kind) {
        case TypeKind::Loc:
            if (!j.is_number_integer()) throw LoadError(where + ": expected a location (int)");
            return Value::loc(j.get<int>());
        case TypeKind::Int:
            if (!j.is_number_integer()) throw LoadError(where + ": expected an Int");
            return Value::integer(j.get<long long>());
        case TypeKind::Float:
            if (!j.is_number()) throw LoadError(where + ": expected a Float");
            return Value::real(j.get<double>());
        case TypeKind::Bool:
            if (!j.is_boolean()) throw LoadError(where + ": expected a Bool");
            return Value::boolean(j.get<bool>());
        case TypeKind::Qubit:
            if (!j.is_number_integer()) throw LoadError(where + ": expected a qubit id (int)");
            return Value::qubit(j.get<int>());
        case TypeKind::List: {
            if (!j.is_array()) throw LoadError(where + ": expected a list");
            std::vector<Value> out;
            for (std::size_t i = 0; i < j.size(); ++i)
                out.push_back(decode_value(j[i], type.args[0], program,
                                           where + "[" + std::to_string(i) + "]"));
            return Value::list(std::move(out));
        }
        case TypeKind::Pair: {
            if (!j.is_array() || j.size() != 2)
                throw LoadError(where + ": expected a pair (2-element array)");
            return Value::pair(decode_value(j[0], type.args[0], program, where + ".0"),
                               decode_value(j[1], type.args[1], program, where + ".1"));
        }
        case TypeKind::Struct: {
            if (j.is_string() && j.get<std::string>() == "id" && type.name == "Transition")
                return Value::id_trans();
            if (!j.is_object() || !j.contains("$struct") ||
                j["$struct"].get<std::string>() != type.name)
                throw LoadError(where + ": expected a " + type.name + " struct value");
            const StructDecl& decl = type.name == "GateRealization" ? program.realization_decl
                                                                    : program.transition_decl;
            std::vector<std::pair<std::string, Value>> fields;
            for (const auto& [fname, ftype] : decl.fields) {
                if (!j.contains(fname))
                    throw LoadError(where + ": missing struct field '" + fname + "'");
                fields.emplace_back(
                    fname, decode_value(j[fname], ftype, program, where + "." + fname));
            }
            return Value::strct(type.name, std::move(fields));
        }
        default:
            throw LoadError(where + ": cannot decode type " + to_string(type));
    }
}

}  // namespace marol
