#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arch_io.hpp"
#include "diagnostics.hpp"
#include "parser.hpp"
#include "problems.hpp"
#include "typecheck.hpp"

using namespace marol;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int content_lines(const std::string& source) {
    std::istringstream in(source);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;          // blank
        if (line.compare(first, 2, "//") == 0) continue;   // comment-only
        ++count;
    }
    return count;
}

} // namespace

TEST_CASE("bundle catalog") {
    CHECK(builtin_problems().size() == 3);
    CHECK_THROWS_AS(builtin_problem("nope"), LoadError);
    CHECK(builtin_problem("nisqmr").noninterfering);
    CHECK(builtin_problem("nisq_ve").noninterfering);
    CHECK_FALSE(builtin_problem("scmr").noninterfering);
}

TEST_CASE("the nisqmr bundle is twelve content lines") {
    CHECK(content_lines(builtin_problem("nisqmr").source) == 12);
}

TEST_CASE("every bundle parses, typechecks, and matches its classification") {
    for (const auto& bundle : builtin_problems()) {
        CAPTURE(bundle.name);
        MarolProgram p = parse_program(bundle.source);
        CHECK_NOTHROW(typecheck(p));
        CHECK(analyze_noninterference(p) == bundle.noninterfering);
        // round-trip: parse(pretty(parse(src))) equals parse(src)
        MarolProgram q = parse_program(to_source(p));
        CHECK(program_equal(p, q));
    }
}

TEST_CASE("installed problem files match the embedded sources") {
    for (const auto& bundle : builtin_problems()) {
        CAPTURE(bundle.name);
        std::string path = std::string(MAROL_PROBLEMS_DIR) + "/" + bundle.name + ".marol";
        CHECK(slurp(path) == bundle.source);
        std::string manifest_path = std::string(MAROL_PROBLEMS_DIR) + "/" + bundle.name + ".json";
        json manifest = json::parse(slurp(manifest_path));
        CHECK(manifest["name"] == bundle.name);
        CHECK(manifest["source"] == bundle.name + ".marol");
        CHECK(manifest["noninterfering"] == bundle.noninterfering);
    }
}

TEST_CASE("gen_arch line") {
    json j = json::parse(gen_arch("line", 4, 0));
    CHECK(j["n"] == 4);
    REQUIRE(j["edges"].size() == 3);
    CHECK(j["edges"][0] == json::array({0, 1}));
    CHECK(j["edges"][2] == json::array({2, 3}));
    CHECK(json::parse(gen_arch("line", 0, 0))["n"] == 0);
}

TEST_CASE("gen_arch grid") {
    json j = json::parse(gen_arch("grid", 3, 3));
    CHECK(j["n"] == 9);
    CHECK(j["edges"].size() == 12);
    CHECK(j["fields"]["width"] == 3);
    CHECK(j["fields"]["height"] == 3);
    CHECK(j["fields"]["magic_state"].empty());
    CHECK(j["fields"]["map_location"].size() == 9);
    CHECK_THROWS_AS(gen_arch("grid", 0, 3), LoadError);
    CHECK_THROWS_AS(gen_arch("bogus", 1, 1), LoadError);
}

TEST_CASE("gen_arch compact_magic_column extends the grid by a magic column") {
    json j = json::parse(gen_arch("compact_magic_column", 3, 3));
    CHECK(j["n"] == 12);
    CHECK(j["fields"]["width"] == 4);
    CHECK(j["fields"]["height"] == 3);
    CHECK(j["fields"]["magic_state"] == json::array({3, 7, 11}));
    CHECK(j["fields"]["map_location"].size() == 9);
}

TEST_CASE("gen_arch compact flags map locations and perimeter magic cells") {
    json j = json::parse(gen_arch("compact", 6, 0));
    int width = j["fields"]["width"].get<int>();
    int height = j["fields"]["height"].get<int>();
    CHECK(height == 5);
    CHECK(width == 5);
    CHECK(j["fields"]["map_location"].size() == 6);
    // all magic cells on the perimeter, and the full perimeter is magic
    auto on_perimeter = [&](int v) {
        int r = v / width, c = v % width;
        return r == 0 || r == height - 1 || c == 0 || c == width - 1;
    };
    for (const auto& v : j["fields"]["magic_state"]) CHECK(on_perimeter(v.get<int>()));
    CHECK(j["fields"]["magic_state"].size() ==
          static_cast<std::size_t>(2 * width + 2 * height - 4));
    // map locations sit in the two logical rows, off the perimeter
    for (const auto& v : j["fields"]["map_location"]) {
        int r = v.get<int>() / width;
        CHECK((r == 1 || r == 3));
        CHECK_FALSE(on_perimeter(v.get<int>()));
    }
    // odd capacity still works
    json j7 = json::parse(gen_arch("compact", 7, 0));
    CHECK(j7["fields"]["map_location"].size() == 7);
}

TEST_CASE("gen_ve_errors is reproducible and encodes -log(1-p)") {
    std::string base = gen_arch("line", 4, 0);
    std::string a = gen_ve_errors(base, 42);
    std::string b = gen_ve_errors(base, 42);
    CHECK(a == b);
    CHECK(a != gen_ve_errors(base, 43));

    json j = json::parse(a);
    auto cost = j["fields"]["edge_cost"];
    auto rate = j["fields"]["edge_error_rate"];
    int edges_seen = 0;
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v) {
            double p = rate[u][v].get<double>();
            double c = cost[u][v].get<double>();
            if (u + 1 == v || v + 1 == u) {
                ++edges_seen;
                CHECK(p >= 1e-3);
                CHECK(p <= 1e-1);
                CHECK(c == doctest::Approx(-std::log1p(-p)).epsilon(1e-12));
                CHECK(std::exp(-c) == doctest::Approx(1.0 - p).epsilon(1e-12));
            } else {
                CHECK(p == 0.0);
                CHECK(c == 0.0);
            }
        }
    CHECK(edges_seen == 6); // both orientations of the three edges
    // symmetric matrices
    CHECK(cost[0][1] == cost[1][0]);
}

TEST_CASE("generated arches load against their intended programs") {
    MarolProgram scmr = parse_program(builtin_problem("scmr").source);
    typecheck(scmr);
    CHECK_NOTHROW(parse_arch(gen_arch("grid", 3, 3), scmr));
    CHECK_NOTHROW(parse_arch(gen_arch("compact", 6, 0), scmr));
    CHECK_NOTHROW(parse_arch(gen_arch("compact_magic_column", 3, 3), scmr));

    MarolProgram ve = parse_program(builtin_problem("nisq_ve").source);
    typecheck(ve);
    CHECK_NOTHROW(parse_arch(gen_ve_errors(gen_arch("grid", 2, 3), 1), ve));
    // plain arches lack edge_cost
    CHECK_THROWS_AS(parse_arch(gen_arch("grid", 2, 3), ve), LoadError);
}
