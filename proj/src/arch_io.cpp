#include "arch_io.hpp"

#include <json.hpp>

#include "diagnostics.hpp"
#include "value_json.hpp"

namespace marol {

using nlohmann::json;

LoadedArch parse_arch(const std::string& json_text, const MarolProgram& program) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ParseError({}, std::string("arch: ") + err.what());
    }
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        throw LoadError("arch: missing integer field 'n'");
    int n = j["n"].get<int>();

    std::vector<std::pair<int, int>> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw LoadError("arch: 'edges' must be an array");
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                throw LoadError("arch: each edge must be a [u, v] pair");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    }

    LoadedArch out;
    out.graph = std::make_shared<const ArchGraph>(n, std::move(edges));

    auto arch_data = std::make_shared<ArchData>();
    arch_data->graph = out.graph.get();

    if (program.has_arch_info) {
        const json empty = json::object();
        const json& fields = j.contains("fields") ? j["fields"] : empty;
        const json& labels = j.contains("vertex_labels") ? j["vertex_labels"] : empty;
        if (!fields.is_object()) throw LoadError("arch: 'fields' must be an object");
        if (!labels.is_object()) throw LoadError("arch: 'vertex_labels' must be an object");
        for (const auto& [name, type] : program.arch_decl.fields) {
            const json* src = nullptr;
            bool from_labels = false;
            if (fields.contains(name)) {
                src = &fields[name];
            } else if (labels.contains(name)) {
                src = &labels[name];
                from_labels = true;
            } else {
                throw LoadError("arch: missing field '" + name +
                                "' required by the program's ArchInfo");
            }
            Value v = decode_value(*src, type, program, "arch field '" + name + "'");
            if (from_labels) {
                if (type.kind != TypeKind::List)
                    throw LoadError("arch: vertex label '" + name + "' must have a list type");
                if (v.as_list().size() != static_cast<std::size_t>(n))
                    throw LoadError("arch: vertex label '" + name + "' must have length n=" +
                                    std::to_string(n));
            }
            arch_data->fields.emplace_back(name, std::move(v));
        }
    }
    out.data = std::move(arch_data);
    return out;
}

}  // namespace marol
