#pragma once

#include <json.hpp>

#include "ast.hpp"
#include "value.hpp"

namespace marol {

// Type-free value encoding: structs as {"$struct": name, fields...}, pairs
// as 2-arrays, locs/qubits as ints, lists as arrays.
nlohmann::ordered_json encode_value(const Value& v);

// Type-directed decoding (pairs vs lists disambiguate via the type). Struct
// fields decode per the program's declarations.
Value decode_value(const nlohmann::json& j, const Type& type, const MarolProgram& program,
                   const std::string& where);

}  // namespace marol
