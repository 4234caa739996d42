#include "cubature/meshes_walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cubature/error.hpp"
#include "cubature/parallel.hpp"

namespace cubature {

namespace {

constexpr std::size_t kChunk = 8192;

}  // namespace

Mesh::Mesh(std::vector<double> nodes, std::string label) : nodes_(std::move(nodes)), label_(std::move(label)) {
    if (nodes_.size() < 2) throw ContractViolation("mesh needs at least one interval");
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0) throw ContractViolation("mesh must run from 0 to 1");
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
        if (!(nodes_[k] > nodes_[k - 1])) throw ContractViolation("mesh nodes must be strictly increasing");
    }
}

double Mesh::mesh_size() const noexcept {
    double out = 0.0;
    for (std::size_t k = 1; k < nodes_.size(); ++k) out = std::max(out, dt(k));
    return out;
}

Mesh uniform_mesh(std::size_t n) {
    if (n < 1) throw ContractViolation("uniform mesh needs n >= 1");
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = static_cast<double>(k) / static_cast<double>(n);
    t[n] = 1.0;
    return Mesh(std::move(t), "uniform:" + std::to_string(n));
}

Mesh kusuoka_mesh(std::size_t n, double gamma) {
    if (n < 1) throw ContractViolation("kusuoka mesh needs n >= 1");
    if (!(gamma >= 1.0)) throw ContractViolation("kusuoka mesh needs gamma >= 1");
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        t[k] = std::pow(static_cast<double>(k) / static_cast<double>(n), gamma);
    }
    t[n] = 1.0;
    std::ostringstream label;
    label << "kusuoka:" << n << ':' << gamma;
    return Mesh(std::move(t), label.str());
}

Mesh parse_mesh(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    auto parse_n = [&](const std::string& s) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || v < 1) throw ContractViolation("bad mesh size in '" + spec + "'");
        return static_cast<std::size_t>(v);
    };
    if (parts.size() == 2 && parts[0] == "uniform") return uniform_mesh(parse_n(parts[1]));
    if (parts.size() == 3 && parts[0] == "kusuoka") {
        std::size_t pos = 0;
        double gamma = 0.0;
        try {
            gamma = std::stod(parts[2], &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != parts[2].size()) throw ContractViolation("bad kusuoka exponent in '" + spec + "'");
        return kusuoka_mesh(parse_n(parts[1]), gamma);
    }
    throw ContractViolation("mesh must be 'uniform:n' or 'kusuoka:n:gamma', got '" + spec + "'");
}

PiecewiseLinearPath build_cubature_path(const CubatureFormula& formula, const Mesh& mesh, Rng& rng) {
    const int d = formula.dimension();
    const auto dd = static_cast<std::size_t>(d);
    const bool with_time = formula.time_component() != TimeComponent::none;
    const bool identity = formula.time_component() == TimeComponent::identity;

    std::vector<double> bp{0.0};
    std::vector<double> nodes(dd, 0.0);
    std::vector<double> h;
    if (with_time) h.push_back(0.0);
    std::vector<double> x(dd, 0.0);

    for (std::size_t k = 1; k <= mesh.intervals(); ++k) {
        const double t0 = mesh.node(k - 1);
        const double t1 = mesh.node(k);
        const double dt = mesh.dt(k);
        const double scale = std::sqrt(dt);
        const double h0 = with_time ? h.back() : 0.0;
        const auto piece = formula.draw(rng);
        const std::size_t last = piece.num_nodes() - 1;
        for (std::size_t i = 1; i <= last; ++i) {
            const double s = i == last ? t1 : t0 + dt * piece.breakpoints()[i];
            if (i < last && !(s > bp.back())) continue;  // collapsed by rounding
            const auto v = piece.node(i);
            for (std::size_t c = 0; c < dd; ++c) nodes.push_back(x[c] + scale * v[c]);
            if (with_time) {
                double hv = h0 + dt * piece.time_value(i);
                if (identity) hv = s;
                else if (i == last && piece.time_value(i) == 1.0) hv = t1;
                h.push_back(hv);
            }
            bp.push_back(s);
        }
        std::copy(nodes.end() - static_cast<std::ptrdiff_t>(dd), nodes.end(), x.begin());
    }
    if (with_time) return PiecewiseLinearPath(d, std::move(bp), std::move(nodes), std::move(h));
    return PiecewiseLinearPath(d, std::move(bp), std::move(nodes));
}

WalkSample walk_nodes(const PiecewiseLinearPath& path, const Mesh& mesh, int m, bool include_time) {
    if (std::abs(path.duration() - 1.0) > 1e-12) throw ContractViolation("walk_nodes: path must live on [0, 1]");
    WalkSample out{mesh, {}, (include_time || !path.has_time_component()) ? path : path.spatial()};
    const auto& p = out.path;
    out.node_elements.reserve(mesh.intervals() + 1);
    out.node_elements.push_back(GroupElement::unit(path_alphabet(p), m));
    std::size_t prev = 0;
    for (std::size_t k = 1; k <= mesh.intervals(); ++k) {
        const auto idx = p.breakpoint_index(mesh.node(k));
        if (!idx) throw ContractViolation("walk_nodes: mesh node is not a path breakpoint");
        TensorSeries s = out.node_elements.back().series();
        std::vector<double> v(static_cast<std::size_t>(path_alphabet(p).size()));
        for (std::size_t i = prev; i < *idx; ++i) {
            std::size_t off = 0;
            if (p.has_time_component()) v[off++] = p.time_value(i + 1) - p.time_value(i);
            const auto a = p.node(i);
            const auto b = p.node(i + 1);
            for (std::size_t c = 0; c < a.size(); ++c) v[off + c] = b[c] - a[c];
            mul_exp_inplace(s, v);
        }
        out.node_elements.emplace_back(std::move(s));
        prev = *idx;
    }
    return out;
}

double holder_statistic(const WalkSample& walk, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractViolation("holder_statistic: alpha must lie in (0, 1)");
    const auto& xi = walk.node_elements;
    const std::size_t n = xi.size() - 1;
    std::vector<GroupElement> inv;
    inv.reserve(xi.size());
    for (const auto& g : xi) inv.push_back(inverse(g));
    double out = 0.0;
    for (std::size_t step = 1; step <= n; step *= 2) {
        for (std::size_t k = 0; k + step <= n; ++k) {
            const double dist = homogeneous_norm(inv[k] * xi[k + step]);
            const double span = walk.mesh.node(k + step) - walk.mesh.node(k);
            out = std::max(out, dist / std::pow(span, alpha));
        }
    }
    return out;
}

std::vector<double> holder_statistic_sample(const CubatureFormula& formula, const Mesh& mesh, double alpha,
                                            std::size_t samples, std::uint64_t seed, unsigned workers) {
    auto parts = run_chunks(samples, kChunk, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, chunk);
        std::vector<double> local;
        local.reserve(end - begin);
        for (std::size_t s = begin; s < end; ++s) {
            const auto walk = walk_nodes(build_cubature_path(formula, mesh, rng), mesh, 2);
            local.push_back(holder_statistic(walk, alpha));
        }
        return local;
    });
    std::vector<double> out;
    out.reserve(samples);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    return out;
}

ScalingReport moment_scaling_check(const CubatureFormula& formula, std::span<const Mesh> meshes, int p,
                                   std::size_t samples, std::uint64_t seed, unsigned workers) {
    if (p < 1) throw ContractViolation("moment_scaling_check: p must be >= 1");
    if (samples < 10'000) throw ContractViolation("moment_scaling_check: needs at least 1e4 samples");
    if (meshes.empty()) throw ContractViolation("moment_scaling_check: empty mesh family");

    ScalingReport report;
    report.p = p;
    report.samples = samples;
    std::vector<double> all_x;
    std::vector<double> all_y;
    double max_ratio = 0.0;
    bool finite = true;

    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
        const Mesh& mesh = meshes[mi];
        const std::size_t n = mesh.intervals();
        const std::uint64_t mesh_seed = derive_seed(seed, 0x5ca1e000ULL + mi);
        auto parts = run_chunks(samples, kChunk, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
            Rng rng = make_rng(mesh_seed, chunk);
            VectorStats acc(n);
            std::vector<double> row(n);
            for (std::size_t s = begin; s < end; ++s) {
                const auto walk = walk_nodes(build_cubature_path(formula, mesh, rng), mesh, 2);
                for (std::size_t k = 1; k <= n; ++k) {
                    row[k - 1] = std::pow(homogeneous_norm(walk.node_elements[k]), 4 * p);
                }
                acc.add(row);
            }
            return acc;
        });
        VectorStats total(n);
        for (const auto& part : parts) total.merge(part);

        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t k = 1; k <= n; ++k) {
            ScalingRow row;
            row.mesh = mesh.label();
            row.n = n;
            row.k = k;
            row.t = mesh.node(k);
            row.moment = total.mean(k - 1);
            row.stderr_ = total.stderr_of_mean(k - 1);
            row.ratio = row.moment / std::pow(row.t, 2 * p);
            finite = finite && std::isfinite(row.ratio);
            max_ratio = std::max(max_ratio, row.ratio);
            if (row.ratio > 0.0) {
                xs.push_back(std::log(row.t));
                ys.push_back(std::log(row.ratio));
            }
            report.rows.push_back(row);
        }
        report.mesh_slopes.push_back(xs.size() >= 2 ? least_squares_slope(xs, ys) : 0.0);
        all_x.insert(all_x.end(), xs.begin(), xs.end());
        all_y.insert(all_y.end(), ys.begin(), ys.end());
    }
    report.pooled_slope = all_x.size() >= 2 ? least_squares_slope(all_x, all_y) : 0.0;
    report.max_ratio = max_ratio;
    report.bounded = finite && std::abs(report.pooled_slope) <= report.slope_tolerance;
    return report;
}

bool MarginalReport::ks_passed() const noexcept {
    return std::all_of(ks_pass.begin(), ks_pass.end(), [](bool b) { return b; });
}

MarginalReport donsker_marginal_check(const CubatureFormula& formula, const Mesh& mesh, std::size_t samples,
                                      std::uint64_t seed, unsigned workers) {
    if (samples < 100'000) throw ContractViolation("donsker_marginal_check: needs at least 1e5 samples");
    const int d = formula.dimension();
    const auto dd = static_cast<std::size_t>(d);
    const Alphabet spatial{d, false};

    struct Part {
        std::vector<double> coords;  // sample-major, d per sample
        std::vector<double> area;
    };
    auto parts = run_chunks(samples, kChunk, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, chunk);
        Part part;
        part.coords.reserve((end - begin) * dd);
        std::vector<double> v(dd);
        for (std::size_t s = begin; s < end; ++s) {
            const auto path = build_cubature_path(formula, mesh, rng);
            TensorSeries sig = TensorSeries::unit(spatial, 2);
            for (std::size_t i = 0; i + 1 < path.num_nodes(); ++i) {
                const auto a = path.node(i);
                const auto b = path.node(i + 1);
                for (std::size_t c = 0; c < dd; ++c) v[c] = b[c] - a[c];
                mul_exp_inplace(sig, v);
            }
            const auto l1 = sig.level(1);
            part.coords.insert(part.coords.end(), l1.begin(), l1.end());
            if (d >= 2) part.area.push_back(0.5 * (sig.coefficient({1, 2}) - sig.coefficient({2, 1})));
        }
        return part;
    });

    MarginalReport report;
    report.samples = samples;
    std::vector<std::vector<double>> coord(dd);
    std::vector<double> area;
    for (auto& c : coord) c.reserve(samples);
    area.reserve(d >= 2 ? samples : 0);
    for (const auto& part : parts) {
        for (std::size_t s = 0; s < part.coords.size() / dd; ++s) {
            for (std::size_t c = 0; c < dd; ++c) coord[c].push_back(part.coords[s * dd + c]);
        }
        area.insert(area.end(), part.area.begin(), part.area.end());
    }
    for (auto& c : coord) {
        std::sort(c.begin(), c.end());
        const double stat = ks_statistic(c, normal_cdf);
        const double pv = ks_pvalue(stat, c.size());
        report.ks_statistic.push_back(stat);
        report.ks_pvalue.push_back(pv);
        report.ks_pass.push_back(pv >= report.significance);
    }

    report.area_applicable = d >= 2;
    if (report.area_applicable) {
        RunningStats st;
        for (double a : area) st.add(a);
        const double n = static_cast<double>(area.size());
        const double mean = st.mean();
        const double var = st.variance();
        CompensatedSum m4;
        for (double a : area) m4.add(std::pow(a - mean, 4));
        const double mu4 = m4.value() / n;
        report.area_mean = mean;
        report.area_mean_stderr = st.stderr_of_mean();
        report.area_variance = var;
        report.area_variance_stderr = std::sqrt(std::max(0.0, mu4 - var * var) / n);
        report.area_mean_pass = std::abs(mean) <= 4.0 * report.area_mean_stderr;
        report.area_variance_pass = std::abs(var - 0.25) <= 4.0 * report.area_variance_stderr;
    }
    return report;
}

ConditionReport clt_condition_report(const CubatureFormula& formula, std::span<const Mesh> meshes,
                                     const ConditionOptions& options) {
    const int d = formula.dimension();
    const auto dd = static_cast<std::size_t>(d);

    // Increment law as weighted step-2 elements (atoms, or equal-weight draws).
    std::vector<GroupElement> atoms;
    std::vector<double> weights;
    if (options.mode == MomentMode::exact) {
        if (!formula.is_discrete()) throw UnsupportedMode("exact condition report requires a discrete formula");
        for (std::size_t j = 0; j < formula.atoms().size(); ++j) {
            const auto& a = formula.atoms()[j];
            atoms.push_back(signature(a.has_time_component() ? a.spatial() : a, 2));
            weights.push_back(formula.weights()[j]);
        }
    } else {
        if (options.samples < 1) throw ContractViolation("clt_condition_report: needs samples >= 1");
        Rng rng = make_rng(options.seed, 0);
        for (std::size_t s = 0; s < options.samples; ++s) {
            const auto a = formula.draw(rng);
            atoms.push_back(signature(a.has_time_component() ? a.spatial() : a, 2));
            weights.push_back(1.0 / static_cast<double>(options.samples));
        }
    }
    std::vector<TensorSeries> logs;
    logs.reserve(atoms.size());
    for (const auto& g : atoms) logs.push_back(log_trunc(g).series());

    ConditionReport report;
    report.d = d;
    {
        CompensatedSum acc;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            const double nrm = homogeneous_norm(atoms[j]);
            acc.add(weights[j] * nrm * nrm);
        }
        report.second_moment = acc.value();
    }

    for (const Mesh& mesh : meshes) {
        ConditionRow row;
        row.n = mesh.intervals();
        row.mesh_size = mesh.mesh_size();
        CompensatedSum second;
        CompensatedSum trunc_half;
        CompensatedSum trunc_one;
        std::vector<CompensatedSum> a(dd * dd);
        std::vector<CompensatedSum> b(dd * dd);
        for (std::size_t k = 1; k <= mesh.intervals(); ++k) {
            const double lambda = std::sqrt(mesh.dt(k));
            for (std::size_t j = 0; j < atoms.size(); ++j) {
                const double w = weights[j];
                const double nrm = homogeneous_norm(dilate(atoms[j], lambda));
                const double sq = nrm * nrm;
                second.add(w * sq);
                if (nrm > 0.5) trunc_half.add(w * sq);
                if (nrm > 1.0) trunc_one.add(w * sq);
                const TensorSeries l = dilate(logs[j], lambda);
                const auto x = l.level(1);
                const auto area = l.level(2);
                for (std::size_t r = 0; r < dd; ++r) {
                    for (std::size_t c = 0; c < dd; ++c) {
                        b[r * dd + c].add(w * x[r] * x[c]);
                        if (r < c) a[r * dd + c].add(w * area[r * dd + c]);
                    }
                }
            }
        }
        row.second_moment_sum = second.value();
        row.truncated_half = trunc_half.value();
        row.truncated_one = trunc_one.value();
        row.a.resize(dd * dd);
        row.b.resize(dd * dd);
        for (std::size_t i = 0; i < dd * dd; ++i) {
            row.a[i] = a[i].value();
            row.b[i] = b[i].value();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace cubature
