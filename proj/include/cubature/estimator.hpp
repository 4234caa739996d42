#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubature/cubature_formula.hpp"
#include "cubature/meshes_walks.hpp"
#include "cubature/payoff.hpp"
#include "cubature/sde.hpp"

namespace cubature {

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;    ///< finite samples used
    std::size_t divergent = 0;  ///< samples excluded for blow-up
    bool reliable = true;       ///< false when more than 0.1% diverged
};

struct McOptions {
    std::size_t samples = 100'000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    IntegrationOptions integration;
};

/// Mean and standard error of the payoff over independently built cubature paths.
Estimate estimate_mc(const CubatureFormula& formula, const Mesh& mesh, const VectorFieldSystem& vf,
                     const Payoff& payoff, std::span<const double> x0, const McOptions& options);

inline constexpr double kDefaultTreeBudget = 1e7;

struct TreeOptions {
    double budget = kDefaultTreeBudget;
    unsigned workers = 1;
    IntegrationOptions integration;
};

/// Exhaustive expectation over all k^n branch words of a discrete formula
/// for a terminal payoff. Throws BudgetExceeded when k^n > budget.
double estimate_tree(const CubatureFormula& formula, const Mesh& mesh, const VectorFieldSystem& vf,
                     const Payoff& payoff, std::span<const double> x0, const TreeOptions& options = {});

/// Meshes "uniform" or "kusuoka" (with gamma) at each n.
struct MeshFamily {
    std::string kind = "uniform";
    double gamma = 1.0;
    std::vector<std::size_t> sizes;

    Mesh mesh(std::size_t n) const;
};

struct Reference {
    double value = 0.0;
    double stderr_ = 0.0;
};

enum class StudyMethod { monte_carlo, tree };

struct StudyOptions {
    StudyMethod method = StudyMethod::monte_carlo;
    McOptions mc;  ///< seed is split per row
    TreeOptions tree;
    double resolve_sigmas = 4.0;
};

struct ConvergenceRow {
    std::size_t n = 0;
    double mesh_size = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double reference = 0.0;
    double abs_error = 0.0;
    bool resolvable = false;  ///< abs_error > resolve_sigmas * joint stderr
    bool reliable = true;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  ///< sorted by n
    double reference_stderr = 0.0;
    std::size_t resolvable_rows = 0;
    /// Least-squares slope of log abs_error against log mesh_size over
    /// resolvable rows; absent with fewer than 3 of them.
    std::optional<double> fitted_order;
};

ConvergenceReport convergence_study(const CubatureFormula& formula, const MeshFamily& family,
                                    const VectorFieldSystem& vf, const Payoff& payoff, std::span<const double> x0,
                                    const Reference& reference, const StudyOptions& options);

}  // namespace cubature
