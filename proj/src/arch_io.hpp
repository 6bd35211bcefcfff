#pragma once

#include <memory>
#include <string>

#include "archgraph.hpp"
#include "ast.hpp"
#include "value.hpp"

namespace marol {

// An arch bound to a program: the graph plus ArchInfo field payloads decoded
// at their declared types.
struct LoadedArch {
    std::shared_ptr<const ArchGraph> graph;
    std::shared_ptr<const ArchData> data;
};

// Parses the arch JSON {"n", "edges", "vertex_labels", "fields"} and
// validates it against the program's ArchInfo declaration. Programs with an
// empty ArchInfo accept any fields (ignored). Throws LoadError/ParseError.
LoadedArch parse_arch(const std::string& json_text, const MarolProgram& program);

}  // namespace marol
