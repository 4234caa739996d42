#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cubature/cubature_formula.hpp"
#include "cubature/paths.hpp"
#include "cubature/random.hpp"
#include "cubature/stats.hpp"
#include "cubature/tensor_algebra.hpp"

namespace cubature {

/// Partition 0 = t_0 < t_1 < ... < t_n = 1.
class Mesh {
public:
    explicit Mesh(std::vector<double> nodes, std::string label = "custom");

    std::size_t intervals() const noexcept { return nodes_.size() - 1; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double node(std::size_t k) const noexcept { return nodes_[k]; }
    /// t_k - t_{k-1}, k = 1..n.
    double dt(std::size_t k) const noexcept { return nodes_[k] - nodes_[k - 1]; }
    /// |D| = max_k dt(k).
    double mesh_size() const noexcept;
    const std::string& label() const noexcept { return label_; }

private:
    std::vector<double> nodes_;
    std::string label_;
};

/// Nodes k / n.
Mesh uniform_mesh(std::size_t n);
/// Nodes (k / n)^gamma, gamma >= 1.
Mesh kusuoka_mesh(std::size_t n, double gamma);
/// "uniform:n" or "kusuoka:n:gamma".
Mesh parse_mesh(const std::string& spec);

/// W^D: n independent draws, the k-th rescaled to [t_{k-1}, t_k] and
/// concatenated. Mesh nodes are breakpoints of the result, and the time
/// component (when present) satisfies h^D(t_k) = t_k exactly.
PiecewiseLinearPath build_cubature_path(const CubatureFormula& formula, const Mesh& mesh, Rng& rng);

/// Group-valued walk Xi_k = S_m(W^D)_{0, t_k} at the mesh nodes.
struct WalkSample {
    Mesh mesh;
    std::vector<GroupElement> node_elements;
    PiecewiseLinearPath path;
};

/// Node signatures by incremental Chen products. The walk lives on the
/// spatial alphabet unless `include_time` is set and the path carries h.
WalkSample walk_nodes(const PiecewiseLinearPath& path, const Mesh& mesh, int m, bool include_time = false);

/// max over node pairs (k, k + 2^j) of d(Xi_k, Xi_{k+2^j}) / (t_{k+2^j} - t_k)^alpha.
double holder_statistic(const WalkSample& walk, double alpha);

/// Sorted sample of holder_statistic over independent step-2 walks.
std::vector<double> holder_statistic_sample(const CubatureFormula& formula, const Mesh& mesh, double alpha,
                                            std::size_t samples, std::uint64_t seed, unsigned workers = 1);

struct ScalingRow {
    std::string mesh;
    std::size_t n = 0;
    std::size_t k = 0;
    double t = 0.0;
    double moment = 0.0;  ///< MC estimate of E ||Xi_k||^{4p}
    double stderr_ = 0.0;
    double ratio = 0.0;   ///< moment / t_k^{2p}
};

struct ScalingReport {
    int p = 1;
    std::size_t samples = 0;
    std::vector<ScalingRow> rows;
    std::vector<double> mesh_slopes;  ///< per-mesh log-log slope of ratio against t_k
    double pooled_slope = 0.0;        ///< slope over all rows of the family
    double max_ratio = 0.0;
    double slope_tolerance = 0.3;
    bool bounded = false;             ///< |pooled_slope| <= slope_tolerance and max_ratio finite
};

/// Empirical check that E ||Xi^n_k||^{4p} <= C t_k^{2p} uniformly over a mesh family.
ScalingReport moment_scaling_check(const CubatureFormula& formula, std::span<const Mesh> meshes, int p,
                                   std::size_t samples, std::uint64_t seed, unsigned workers = 1);

struct MarginalReport {
    std::size_t samples = 0;
    double significance = 1e-3;
    std::vector<double> ks_statistic;  ///< per spatial coordinate of Xi_n
    std::vector<double> ks_pvalue;
    std::vector<bool> ks_pass;
    bool area_applicable = false;      ///< d >= 2
    double area_mean = 0.0;
    double area_mean_stderr = 0.0;
    double area_variance = 0.0;
    double area_variance_stderr = 0.0;
    bool area_mean_pass = false;
    bool area_variance_pass = false;

    bool ks_passed() const noexcept;
    bool area_passed() const noexcept { return !area_applicable || (area_mean_pass && area_variance_pass); }
    bool passed() const noexcept { return ks_passed() && area_passed(); }
};

/// Endpoint level-1 marginals against N(0, 1) (Kolmogorov-Smirnov) and the
/// Levy area A^{1,2} against mean 0, variance 1/4.
MarginalReport donsker_marginal_check(const CubatureFormula& formula, const Mesh& mesh, std::size_t samples,
                                      std::uint64_t seed, unsigned workers = 1);

struct ConditionOptions {
    MomentMode mode = MomentMode::exact;
    std::size_t samples = 10'000;
    std::uint64_t seed = 0;
};

struct ConditionRow {
    std::size_t n = 0;
    double mesh_size = 0.0;
    double second_moment_sum = 0.0;  ///< sum_k E ||xi^n_k||^2
    std::vector<double> a;           ///< d x d, sum_k E x^{ij}(xi^n_k) for i < j
    std::vector<double> b;           ///< d x d, sum_k E x^i x^j (xi^n_k)
    double truncated_half = 0.0;     ///< sum_k E[1{||xi|| > 0.5} ||xi||^2]
    double truncated_one = 0.0;      ///< same at epsilon = 1
};

struct ConditionReport {
    int d = 0;
    double second_moment = 0.0;  ///< E ||xi||^2 of the undilated increment
    std::vector<ConditionRow> rows;
};

/// Numeric values of the Lie-group CLT conditions along a mesh family.
ConditionReport clt_condition_report(const CubatureFormula& formula, std::span<const Mesh> meshes,
                                     const ConditionOptions& options);

}  // namespace cubature
