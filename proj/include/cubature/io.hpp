#pragma once

#include <string>

#include <json.hpp>

#include "cubature/cubature_formula.hpp"
#include "cubature/paths.hpp"
#include "cubature/tensor_algebra.hpp"

namespace cubature {

using Json = nlohmann::ordered_json;

// TensorSeries: {d, has_time_letter, m, levels: [[...], ...]} with levels by
// word length and lexicographic word order within each level (letters 0..d
// when the time letter is present, 1..d otherwise). Slots of words above the
// graded cap are written as 0 and must be 0 on input.
Json tensor_to_json(const TensorSeries& s);
TensorSeries tensor_from_json(const Json& j);

// Path: {d, breakpoints, nodes: [[...], ...], h_breakpoints?, h_nodes?}.
// On input the time component may use its own breakpoints; it is resampled
// onto the union of both breakpoint sets.
Json path_to_json(const PiecewiseLinearPath& p);
PiecewiseLinearPath path_from_json(const Json& j);

// Discrete formula file: {d, m, paths: [{weight, path}], name?, time_component?}.
// time_component defaults to "custom" when the paths carry h and "none"
// otherwise.
Json formula_to_json(const CubatureFormula& f);
CubatureFormula formula_from_json(const Json& j);

Json read_json_file(const std::string& path);

/// Throws ContractViolation naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace cubature
