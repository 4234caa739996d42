#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubature/estimator.hpp"
#include "cubature/io.hpp"

namespace cubature {

/// A model parsed from {model: "black_scholes", N, sigma, drift?, x0?} or
/// {model: "linear", N, A0, ..., Ad, convention?: "stratonovich" | "ito", x0?}.
/// Matrices are nested row arrays. `resolved` echoes the config with
/// defaults filled in.
struct ModelConfig {
    VectorFieldSystem system;
    std::optional<std::vector<double>> x0;
    Json resolved;
};
ModelConfig model_from_json(const Json& j);

/// {kind: call|put|smooth_bump|identity|asian|lookback|barrier, strike?,
///  scale?, level?, direction?: up|down, coordinate?, observation_times?}.
struct PayoffConfig {
    Payoff payoff;
    Json resolved;
};
PayoffConfig payoff_from_json(const Json& j);

/// {kind: uniform|kusuoka, gamma?, n: [...]}.
struct MeshFamilyConfig {
    MeshFamily family;
    Json resolved;
};
MeshFamilyConfig mesh_family_from_json(const Json& j);

/// Reference as a number or {value, stderr?}.
Reference reference_from_json(const Json& j);
Json reference_to_json(const Reference& r);

/// Seed from an explicit value, else the CUBATURE_SEED environment
/// variable, else 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace cubature
