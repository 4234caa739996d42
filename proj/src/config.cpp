#include "cubature/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "cubature/error.hpp"

namespace cubature {

namespace {

const Json& need(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ContractViolation(where + ": missing key '" + key + "'");
    return j.at(key);
}

std::vector<double> matrix_from_json(const Json& j, int n, const std::string& name) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(n)) {
        throw ContractViolation("model: " + name + " must have N rows");
    }
    std::vector<double> out;
    for (const auto& row : j) {
        const auto r = row.get<std::vector<double>>();
        if (r.size() != static_cast<std::size_t>(n)) throw ContractViolation("model: " + name + " must have N columns");
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

Json matrix_to_json(const std::vector<double>& a, int n) {
    Json rows = Json::array();
    for (int r = 0; r < n; ++r) {
        rows.push_back(std::vector<double>(a.begin() + r * n, a.begin() + (r + 1) * n));
    }
    return rows;
}

}  // namespace

ModelConfig model_from_json(const Json& j) {
    const std::string where = "model";
    if (!j.is_object()) throw ContractViolation("model: expected a JSON object");
    const auto kind = need(j, "model", where).get<std::string>();
    std::optional<std::vector<double>> x0;
    if (j.contains("x0")) x0 = j.at("x0").get<std::vector<double>>();

    if (kind == "black_scholes") {
        reject_unknown_keys(j, {"model", "N", "sigma", "drift", "x0"}, where);
        const auto sigma = need(j, "sigma", where).get<std::vector<double>>();
        const int n = j.value("N", static_cast<int>(sigma.size()));
        if (n != static_cast<int>(sigma.size())) throw ContractViolation("model: sigma must list N volatilities");
        const auto drift = j.contains("drift") ? j.at("drift").get<std::vector<double>>()
                                               : std::vector<double>(sigma.size(), 0.0);
        Json resolved;
        resolved["model"] = kind;
        resolved["N"] = n;
        resolved["sigma"] = sigma;
        resolved["drift"] = drift;
        if (x0) resolved["x0"] = *x0;
        return ModelConfig{black_scholes(sigma, drift), x0, resolved};
    }
    if (kind == "linear") {
        const int n = need(j, "N", where).get<int>();
        if (n < 1) throw ContractViolation("model: N must be positive");
        std::vector<std::vector<double>> mats;
        for (int i = 0;; ++i) {
            const std::string key = "A" + std::to_string(i);
            if (!j.contains(key)) break;
            mats.push_back(matrix_from_json(j.at(key), n, key));
        }
        if (mats.size() < 2) throw ContractViolation("model: linear needs A0 and at least A1");
        for (const auto& item : j.items()) {
            const auto& k = item.key();
            const bool matrix_key = k.size() > 1 && k[0] == 'A' &&
                                    k.find_first_not_of("0123456789", 1) == std::string::npos &&
                                    std::stoul(k.substr(1)) < mats.size();
            if (!matrix_key && k != "model" && k != "N" && k != "convention" && k != "x0") {
                throw ContractViolation("model: unknown key '" + k + "'");
            }
        }
        const auto convention = j.value("convention", std::string("stratonovich"));
        if (convention != "stratonovich" && convention != "ito") {
            throw ContractViolation("model: convention must be 'stratonovich' or 'ito'");
        }
        Json resolved;
        resolved["model"] = kind;
        resolved["N"] = n;
        resolved["convention"] = convention;
        for (std::size_t i = 0; i < mats.size(); ++i) resolved["A" + std::to_string(i)] = matrix_to_json(mats[i], n);
        if (x0) resolved["x0"] = *x0;
        if (convention == "ito") mats[0] = ito_to_stratonovich_drift(n, mats);
        return ModelConfig{linear_system(n, std::move(mats)), x0, resolved};
    }
    throw ContractViolation("model: unknown model '" + kind + "'");
}

PayoffConfig payoff_from_json(const Json& j) {
    const std::string where = "payoff";
    reject_unknown_keys(j, {"kind", "strike", "scale", "level", "direction", "coordinate", "observation_times"}, where);
    const auto kind = need(j, "kind", where).get<std::string>();
    const int coord = j.value("coordinate", 0);
    if (coord < 0) throw ContractViolation("payoff: coordinate must be non-negative");
    const auto obs = j.value("observation_times", std::vector<double>{});
    for (double t : obs) {
        if (!(t >= 0.0 && t <= 1.0)) throw ContractViolation("payoff: observation times must lie in [0, 1]");
    }
    Json resolved;
    resolved["kind"] = kind;
    resolved["coordinate"] = coord;
    auto only = [&](std::initializer_list<const char*> allowed) {
        reject_unknown_keys(j, allowed, "payoff '" + kind + "'");
    };
    Payoff p;
    if (kind == "call" || kind == "put") {
        only({"kind", "strike", "coordinate"});
        const double k = need(j, "strike", where).get<double>();
        resolved["strike"] = k;
        p = kind == "call" ? call_payoff(k, coord) : put_payoff(k, coord);
    } else if (kind == "smooth_bump") {
        only({"kind", "scale", "coordinate"});
        const double s = need(j, "scale", where).get<double>();
        resolved["scale"] = s;
        p = smooth_bump_payoff(s, coord);
    } else if (kind == "identity") {
        only({"kind", "coordinate"});
        p = identity_payoff(coord);
    } else if (kind == "asian") {
        only({"kind", "strike", "coordinate", "observation_times"});
        const double k = need(j, "strike", where).get<double>();
        resolved["strike"] = k;
        resolved["observation_times"] = obs;
        p = asian_call_payoff(k, coord, obs);
    } else if (kind == "lookback") {
        only({"kind", "coordinate", "observation_times"});
        resolved["observation_times"] = obs;
        p = lookback_payoff(coord, obs);
    } else if (kind == "barrier") {
        only({"kind", "strike", "level", "direction", "coordinate", "observation_times"});
        const double k = need(j, "strike", where).get<double>();
        const double level = need(j, "level", where).get<double>();
        const auto dir = j.value("direction", std::string("up"));
        if (dir != "up" && dir != "down") throw ContractViolation("payoff: direction must be 'up' or 'down'");
        resolved["strike"] = k;
        resolved["level"] = level;
        resolved["direction"] = dir;
        resolved["observation_times"] = obs;
        p = barrier_call_payoff(k, level, dir == "up", coord, obs);
    } else {
        throw ContractViolation("payoff: unknown kind '" + kind + "'");
    }
    return PayoffConfig{std::move(p), resolved};
}

MeshFamilyConfig mesh_family_from_json(const Json& j) {
    const std::string where = "mesh_family";
    reject_unknown_keys(j, {"kind", "gamma", "n"}, where);
    MeshFamily f;
    f.kind = j.value("kind", std::string("uniform"));
    if (f.kind != "uniform" && f.kind != "kusuoka") {
        throw ContractViolation("mesh_family: kind must be 'uniform' or 'kusuoka'");
    }
    if (f.kind == "uniform" && j.contains("gamma")) throw ContractViolation("mesh_family: gamma needs kind 'kusuoka'");
    f.gamma = j.value("gamma", 1.0);
    if (f.kind == "kusuoka" && !(f.gamma >= 1.0)) throw ContractViolation("mesh_family: gamma must be >= 1");
    f.sizes = need(j, "n", where).get<std::vector<std::size_t>>();
    if (f.sizes.empty()) throw ContractViolation("mesh_family: n must list at least one size");
    for (auto n : f.sizes) {
        if (n < 1) throw ContractViolation("mesh_family: sizes must be >= 1");
    }
    Json resolved;
    resolved["kind"] = f.kind;
    if (f.kind == "kusuoka") resolved["gamma"] = f.gamma;
    resolved["n"] = f.sizes;
    return MeshFamilyConfig{f, resolved};
}

Reference reference_from_json(const Json& j) {
    if (j.is_number()) return Reference{j.get<double>(), 0.0};
    reject_unknown_keys(j, {"value", "stderr"}, "reference");
    Reference r{need(j, "value", "reference").get<double>(), j.value("stderr", 0.0)};
    if (!(r.stderr_ >= 0.0)) throw ContractViolation("reference: stderr must be non-negative");
    return r;
}

Json reference_to_json(const Reference& r) { return Json{{"value", r.value}, {"stderr", r.stderr_}}; }

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
    if (explicit_seed) return *explicit_seed;
    if (const char* env = std::getenv("CUBATURE_SEED"); env && *env) {
        std::uint64_t v = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec != std::errc() || ptr != end) throw ContractViolation("CUBATURE_SEED must be an unsigned integer");
        return v;
    }
    return 0;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace cubature
