#include "aisim/error.hpp"
#include "aisim/grid.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace aisim {

using nlohmann::json;

namespace {

double number_or(const json& obj, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    if (!it->is_number()) throw InvalidGrid(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

std::size_t index_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer() || it->get<long long>() < 0) {
        throw InvalidGrid(std::string("field '") + key + "' must be a non-negative integer");
    }
    return it->get<std::size_t>();
}

}  // namespace

GridSpec parse_grid_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidGrid(std::string("grid file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidGrid("grid file must contain a JSON object");

    GridSpec spec;
    spec.frequency_base_hz = number_or(doc, "frequency_base_hz", 50.0);
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw InvalidGrid("grid file needs a 'nodes' array");
    }
    for (const json& jn : doc["nodes"]) {
        Node n;
        n.id = index_field(jn, "id");
        if (!jn.contains("kind") || !jn["kind"].is_string()) {
            throw InvalidGrid("node " + std::to_string(n.id) + ": missing 'kind'");
        }
        n.kind = node_kind_from_string(jn["kind"].get<std::string>());
        n.P = number_or(jn, "P", 0.0);
        n.d = number_or(jn, "d", n.kind == NodeKind::Load ? kDefaultLoadDamping : 0.0);
        n.m = number_or(jn, "m", 0.0);
        n.m_min = number_or(jn, "m_min", 0.0);
        n.alpha = number_or(jn, "alpha", 0.0);
        n.beta = number_or(jn, "beta", 0.0);
        if (auto it = jn.find("area"); it != jn.end() && !it->is_null()) {
            n.area = it->is_string() ? it->get<std::string>() : it->dump();
        }
        spec.nodes.push_back(std::move(n));
    }
    if (doc.contains("lines")) {
        if (!doc["lines"].is_array()) throw InvalidGrid("'lines' must be an array");
        for (const json& jl : doc["lines"]) {
            spec.lines.push_back(Line{index_field(jl, "from"), index_field(jl, "to"),
                                      number_or(jl, "b", 0.0)});
        }
    }
    return spec;
}

namespace {

json grid_document(const Grid& grid) {
    json doc;
    doc["frequency_base_hz"] = grid.frequency_base_hz();
    json nodes = json::array();
    for (const Node& n : grid.nodes()) {
        json jn;
        jn["id"] = n.id;
        jn["kind"] = std::string(to_string(n.kind));
        jn["P"] = n.P;
        jn["d"] = n.d;
        if (n.kind == NodeKind::Generator || (n.kind == NodeKind::Vsg && n.m > 0.0)) jn["m"] = n.m;
        if (n.kind == NodeKind::Vsg) {
            jn["m_min"] = n.m_min;
            jn["alpha"] = n.alpha;
            jn["beta"] = n.beta;
        }
        jn["area"] = n.area;
        nodes.push_back(std::move(jn));
    }
    doc["nodes"] = std::move(nodes);
    json lines = json::array();
    for (const Line& l : grid.lines()) lines.push_back({{"from", l.from}, {"to", l.to}, {"b", l.b}});
    doc["lines"] = std::move(lines);
    return doc;
}

}  // namespace

std::string grid_to_json(const Grid& grid, int indent) {
    return grid_document(grid).dump(indent);
}

Grid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidGrid("cannot open grid file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return Grid::build(parse_grid_json(buf.str()));
}

void save_grid(const Grid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write grid file '" + path + "'");
    out << grid_to_json(grid) << '\n';
}

std::uint64_t grid_hash(const Grid& grid) {
    const std::string text = grid_document(grid).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace aisim
