#include "cubature/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "cubature/error.hpp"
#include "cubature/parallel.hpp"
#include "cubature/stats.hpp"

namespace cubature {

namespace {

constexpr std::size_t kChunk = 8192;

void check_inputs(const CubatureFormula& formula, const VectorFieldSystem& vf, std::span<const double> x0) {
    if (formula.dimension() != vf.noise_dimension()) {
        throw ContractViolation("formula dimension does not match the number of driving noises");
    }
    if (x0.size() != static_cast<std::size_t>(vf.state_dimension())) {
        throw ContractViolation("x0 dimension does not match the state dimension");
    }
}

struct McPartial {
    RunningStats stats;
    std::size_t divergent = 0;
};

}  // namespace

Estimate estimate_mc(const CubatureFormula& formula, const Mesh& mesh, const VectorFieldSystem& vf,
                     const Payoff& payoff, std::span<const double> x0, const McOptions& options) {
    if (options.samples < 1) throw ContractViolation("estimate_mc: samples must be >= 1");
    check_inputs(formula, vf, x0);
    auto parts = run_chunks(options.samples, kChunk, options.workers,
                            [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                                Rng rng = make_rng(options.seed, chunk);
                                McPartial part;
                                for (std::size_t s = begin; s < end; ++s) {
                                    const auto driver = build_cubature_path(formula, mesh, rng);
                                    try {
                                        const auto sol = integrate_along_path(vf, driver, x0, options.integration,
                                                                              &mesh);
                                        const double v = path_payoff_eval(payoff, sol);
                                        if (std::isfinite(v)) {
                                            part.stats.add(v);
                                        } else {
                                            ++part.divergent;
                                        }
                                    } catch (const DivergenceError&) {
                                        ++part.divergent;
                                    }
                                }
                                return part;
                            });
    RunningStats total;
    std::size_t divergent = 0;
    for (const auto& p : parts) {
        total.merge(p.stats);
        divergent += p.divergent;
    }
    Estimate out;
    out.value = total.mean();
    out.stderr_ = total.stderr_of_mean();
    out.samples = total.count();
    out.divergent = divergent;
    out.reliable = static_cast<double>(divergent) <= 1e-3 * static_cast<double>(options.samples) && total.count() > 0;
    return out;
}

namespace {

/// Per step k and atom j: the rescaled segment increments (dh, dw...) of the block.
struct TreeBlocks {
    std::size_t width = 0;                          // 1 + d
    std::vector<std::vector<std::vector<double>>> seg;  // [k][j] -> flat segments
};

struct TreeWalker {
    const CubatureFormula& formula;
    const VectorFieldSystem& vf;
    const Payoff& payoff;
    const IntegrationOptions& integration;
    const TreeBlocks& blocks;
    std::size_t steps;

    void advance(std::vector<double>& x, std::size_t k, std::size_t j) const {
        const auto& flat = blocks.seg[k][j];
        const std::size_t w = blocks.width;
        for (std::size_t s = 0; s < flat.size() / w; ++s) {
            const double dh = flat[s * w];
            integrate_segment(vf, x, dh, std::span<const double>(flat.data() + s * w + 1, w - 1), integration, s);
        }
    }

    void descend(const std::vector<double>& x, std::size_t k, double weight, CompensatedSum& acc) const {
        if (k == steps) {
            acc.add(weight * payoff.terminal(x));
            return;
        }
        for (std::size_t j = 0; j < formula.atoms().size(); ++j) {
            std::vector<double> y = x;
            advance(y, k, j);
            descend(y, k + 1, weight * formula.weights()[j], acc);
        }
    }
};

}  // namespace

double estimate_tree(const CubatureFormula& formula, const Mesh& mesh, const VectorFieldSystem& vf,
                     const Payoff& payoff, std::span<const double> x0, const TreeOptions& options) {
    if (!formula.is_discrete()) throw UnsupportedMode("tree expansion requires a discrete formula");
    if (payoff.kind != PayoffKind::terminal) throw ContractViolation("tree expansion supports terminal payoffs only");
    check_inputs(formula, vf, x0);
    const std::size_t k = formula.atoms().size();
    const std::size_t n = mesh.intervals();
    const double required = std::pow(static_cast<double>(k), static_cast<double>(n));
    if (required > options.budget) {
        throw BudgetExceeded(required, options.budget,
                             "tree expansion needs " + std::to_string(required) + " branches, budget is " +
                                 std::to_string(options.budget));
    }

    const auto d = static_cast<std::size_t>(formula.dimension());
    TreeBlocks blocks;
    blocks.width = d + 1;
    blocks.seg.resize(n);
    for (std::size_t step = 0; step < n; ++step) {
        const double dt = mesh.dt(step + 1);
        const double scale = std::sqrt(dt);
        for (const auto& atom : formula.atoms()) {
            std::vector<double> flat;
            for (std::size_t s = 0; s + 1 < atom.num_nodes(); ++s) {
                flat.push_back(dt * (atom.time_value(s + 1) - atom.time_value(s)));
                for (std::size_t c = 0; c < d; ++c) flat.push_back(scale * (atom.node(s + 1)[c] - atom.node(s)[c]));
            }
            blocks.seg[step].push_back(std::move(flat));
        }
    }

    const TreeWalker walker{formula, vf, payoff, options.integration, blocks, n};
    // Top-level branches in parallel, reduced in branch order.
    auto parts = run_chunks(k, 1, options.workers, [&](std::size_t j, std::size_t, std::size_t) {
        CompensatedSum acc;
        std::vector<double> y(x0.begin(), x0.end());
        walker.advance(y, 0, j);
        walker.descend(y, 1, formula.weights()[j], acc);
        return acc.value();
    });
    CompensatedSum total;
    for (double v : parts) total.add(v);
    return total.value();
}

Mesh MeshFamily::mesh(std::size_t n) const {
    if (kind == "uniform") return uniform_mesh(n);
    if (kind == "kusuoka") return kusuoka_mesh(n, gamma);
    throw ContractViolation("mesh family kind must be 'uniform' or 'kusuoka', got '" + kind + "'");
}

ConvergenceReport convergence_study(const CubatureFormula& formula, const MeshFamily& family,
                                    const VectorFieldSystem& vf, const Payoff& payoff, std::span<const double> x0,
                                    const Reference& reference, const StudyOptions& options) {
    if (family.sizes.empty()) throw ContractViolation("convergence_study: empty mesh family");
    std::vector<std::size_t> sizes = family.sizes;
    std::sort(sizes.begin(), sizes.end());

    ConvergenceReport report;
    report.reference_stderr = reference.stderr_;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t r = 0; r < sizes.size(); ++r) {
        const Mesh mesh = family.mesh(sizes[r]);
        ConvergenceRow row;
        row.n = sizes[r];
        row.mesh_size = mesh.mesh_size();
        if (options.method == StudyMethod::tree) {
            row.estimate = estimate_tree(formula, mesh, vf, payoff, x0, options.tree);
        } else {
            McOptions mc = options.mc;
            mc.seed = derive_seed(options.mc.seed, 0xc0de0000ULL + sizes[r]);
            const auto est = estimate_mc(formula, mesh, vf, payoff, x0, mc);
            row.estimate = est.value;
            row.stderr_ = est.stderr_;
            row.reliable = est.reliable;
        }
        row.reference = reference.value;
        row.abs_error = std::abs(row.estimate - reference.value);
        const double joint = std::hypot(row.stderr_, reference.stderr_);
        // Rounding floor so deterministic rows with no statistical error are
        // not called resolvable on last-bit noise.
        const double floor = 1e-12 * std::max(1.0, std::abs(reference.value));
        row.resolvable = row.reliable && row.abs_error > std::max(options.resolve_sigmas * joint, floor);
        if (row.resolvable) {
            ++report.resolvable_rows;
            xs.push_back(std::log(row.mesh_size));
            ys.push_back(std::log(row.abs_error));
        }
        report.rows.push_back(row);
    }
    if (report.resolvable_rows >= 3) report.fitted_order = least_squares_slope(xs, ys);
    return report;
}

}  // namespace cubature
