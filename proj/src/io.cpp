#include "cubature/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "cubature/error.hpp"

namespace cubature {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ContractViolation(where + ": expected a JSON object");
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) throw ContractViolation(where + ": unknown key '" + item.key() + "'");
    }
}

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ContractViolation(where + ": missing key '" + key + "'");
    return j.at(key);
}

}  // namespace

Json tensor_to_json(const TensorSeries& s) {
    Json levels = Json::array();
    for (int k = 0; k <= s.level_cap(); ++k) {
        Json lvl = Json::array();
        for (double c : s.level(k)) lvl.push_back(c);
        levels.push_back(std::move(lvl));
    }
    Json j;
    j["d"] = s.alphabet().d;
    j["has_time_letter"] = s.alphabet().has_time_letter;
    j["m"] = s.level_cap();
    j["levels"] = std::move(levels);
    return j;
}

TensorSeries tensor_from_json(const Json& j) {
    const std::string where = "tensor";
    reject_unknown_keys(j, {"d", "has_time_letter", "m", "levels"}, where);
    const Alphabet alphabet{require(j, "d", where).get<int>(), j.value("has_time_letter", false)};
    const int m = require(j, "m", where).get<int>();
    TensorSeries s(alphabet, m);
    const auto& levels = require(j, "levels", where);
    if (!levels.is_array() || levels.size() != static_cast<std::size_t>(m + 1)) {
        throw ContractViolation("tensor: 'levels' must list m + 1 word lengths");
    }
    for (int k = 0; k <= m; ++k) {
        const auto& lvl = levels[static_cast<std::size_t>(k)];
        auto dst = s.level(k);
        if (!lvl.is_array() || lvl.size() != dst.size()) {
            throw ContractViolation("tensor: level " + std::to_string(k) + " has wrong length");
        }
        for (std::size_t w = 0; w < dst.size(); ++w) {
            const double v = lvl[w].get<double>();
            if (!std::isfinite(v)) throw ContractViolation("tensor: non-finite coefficient");
            if (!s.in_range(k, w) && v != 0.0) {
                throw ContractViolation("tensor: nonzero coefficient above the graded cap");
            }
            dst[w] = v;
        }
    }
    return s;
}

Json path_to_json(const PiecewiseLinearPath& p) {
    Json j;
    j["d"] = p.dimension();
    j["breakpoints"] = std::vector<double>(p.breakpoints().begin(), p.breakpoints().end());
    Json nodes = Json::array();
    for (std::size_t i = 0; i < p.num_nodes(); ++i) {
        const auto n = p.node(i);
        nodes.push_back(std::vector<double>(n.begin(), n.end()));
    }
    j["nodes"] = std::move(nodes);
    if (p.has_time_component()) {
        j["h_breakpoints"] = j["breakpoints"];
        j["h_nodes"] = std::vector<double>(p.time_values().begin(), p.time_values().end());
    }
    return j;
}

PiecewiseLinearPath path_from_json(const Json& j) {
    const std::string where = "path";
    reject_unknown_keys(j, {"d", "breakpoints", "nodes", "h_breakpoints", "h_nodes"}, where);
    const int d = require(j, "d", where).get<int>();
    auto bp = require(j, "breakpoints", where).get<std::vector<double>>();
    const auto& nodes_json = require(j, "nodes", where);
    if (!nodes_json.is_array() || nodes_json.size() != bp.size()) {
        throw ContractViolation("path: 'nodes' must hold one point per breakpoint");
    }
    std::vector<double> nodes;
    nodes.reserve(bp.size() * static_cast<std::size_t>(d));
    for (const auto& n : nodes_json) {
        const auto v = n.get<std::vector<double>>();
        if (v.size() != static_cast<std::size_t>(d)) throw ContractViolation("path: node has wrong dimension");
        nodes.insert(nodes.end(), v.begin(), v.end());
    }
    const bool has_h = j.contains("h_nodes") || j.contains("h_breakpoints");
    if (!has_h) return PiecewiseLinearPath(d, std::move(bp), std::move(nodes));

    auto h_nodes = require(j, "h_nodes", where).get<std::vector<double>>();
    auto h_bp = j.contains("h_breakpoints") ? j.at("h_breakpoints").get<std::vector<double>>() : bp;
    if (h_bp == bp) return PiecewiseLinearPath(d, std::move(bp), std::move(nodes), std::move(h_nodes));

    const PiecewiseLinearPath spatial(d, bp, nodes);
    if (h_nodes.size() != h_bp.size()) throw ContractViolation("path: h_nodes and h_breakpoints differ in length");
    if (h_bp.back() != bp.back()) throw ContractViolation("path: time component must span the same interval");
    const PiecewiseLinearPath time(1, h_bp, h_nodes);
    std::set<double> merged(bp.begin(), bp.end());
    merged.insert(h_bp.begin(), h_bp.end());
    std::vector<double> all(merged.begin(), merged.end());
    std::vector<double> all_nodes;
    std::vector<double> all_h;
    for (double s : all) {
        const auto v = spatial.value_at(s);
        all_nodes.insert(all_nodes.end(), v.begin(), v.end());
        all_h.push_back(time.value_at(s)[0]);
    }
    return PiecewiseLinearPath(d, std::move(all), std::move(all_nodes), std::move(all_h));
}

Json formula_to_json(const CubatureFormula& f) {
    if (!f.is_discrete()) throw UnsupportedMode("only discrete formulas can be serialized");
    Json paths = Json::array();
    for (std::size_t i = 0; i < f.atoms().size(); ++i) {
        paths.push_back(Json{{"weight", f.weights()[i]}, {"path", path_to_json(f.atoms()[i])}});
    }
    Json j;
    j["name"] = f.name();
    j["d"] = f.dimension();
    j["m"] = f.order();
    j["time_component"] = to_string(f.time_component());
    j["paths"] = std::move(paths);
    return j;
}

CubatureFormula formula_from_json(const Json& j) {
    const std::string where = "formula";
    reject_unknown_keys(j, {"d", "m", "paths", "name", "time_component"}, where);
    const int d = require(j, "d", where).get<int>();
    const int m = require(j, "m", where).get<int>();
    std::vector<double> weights;
    std::vector<PiecewiseLinearPath> paths;
    bool any_time = false;
    for (const auto& item : require(j, "paths", where)) {
        reject_unknown_keys(item, {"weight", "path"}, "formula path entry");
        weights.push_back(require(item, "weight", where).get<double>());
        paths.push_back(path_from_json(require(item, "path", where)));
        any_time = any_time || paths.back().has_time_component();
    }
    const TimeComponent time = j.contains("time_component")
                                   ? time_component_from_string(j.at("time_component").get<std::string>())
                                   : (any_time ? TimeComponent::custom : TimeComponent::none);
    return CubatureFormula::discrete(j.value("name", std::string("file")), m, d, std::move(weights),
                                     std::move(paths), time);
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ContractViolation("'" + path + "' is not valid JSON: " + e.what());
    }
}

CubatureFormula formula_from_spec(const std::string& spec, int d) {
    if (spec == "builtin:deg3") return degree3_formula(d);
    if (spec == "builtin:wz") return wong_zakai_formula(d);
    if (spec == "builtin:nv") return ninomiya_victoir_formula(d);
    if (spec.rfind("builtin:", 0) == 0) throw ContractViolation("unknown builtin formula '" + spec + "'");
    auto f = formula_from_json(read_json_file(spec));
    if (f.dimension() != d) {
        throw ContractViolation("formula file '" + spec + "' has d = " + std::to_string(f.dimension()) +
                                ", expected " + std::to_string(d));
    }
    return f;
}

}  // namespace cubature
