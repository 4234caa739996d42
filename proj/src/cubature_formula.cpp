#include "cubature/cubature_formula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cubature/error.hpp"
#include "cubature/parallel.hpp"
#include "cubature/stats.hpp"

namespace cubature {

const char* to_string(TimeComponent t) noexcept {
    switch (t) {
        case TimeComponent::none: return "none";
        case TimeComponent::identity: return "identity";
        case TimeComponent::custom: return "custom";
    }
    return "none";
}

TimeComponent time_component_from_string(const std::string& s) {
    if (s == "none") return TimeComponent::none;
    if (s == "identity") return TimeComponent::identity;
    if (s == "custom") return TimeComponent::custom;
    throw ContractViolation("unknown time component '" + s + "'");
}

namespace {

void validate_unit_interval(const PiecewiseLinearPath& p, int d) {
    if (p.dimension() != d) throw ContractViolation("cubature path has wrong dimension");
    if (std::abs(p.duration() - 1.0) > 1e-12) throw ContractViolation("cubature paths must live on [0, 1]");
}

}  // namespace

CubatureFormula CubatureFormula::discrete(std::string name, int order, int d, std::vector<double> weights,
                                          std::vector<PiecewiseLinearPath> paths, TimeComponent time) {
    if (order < 1) throw ContractViolation("cubature order must be positive");
    if (weights.empty() || weights.size() != paths.size()) {
        throw ContractViolation("discrete formula needs one positive weight per path");
    }
    CompensatedSum total;
    for (double w : weights) {
        if (!(w > 0.0)) throw ContractViolation("discrete formula weights must be positive");
        total.add(w);
    }
    if (std::abs(total.value() - 1.0) > 1e-14) {
        throw ContractViolation("discrete formula weights must sum to 1");
    }
    CubatureFormula f;
    f.name_ = std::move(name);
    f.order_ = order;
    f.d_ = d;
    f.time_ = time;
    for (auto& p : paths) {
        validate_unit_interval(p, d);
        switch (time) {
            case TimeComponent::none:
                if (p.has_time_component()) p = p.spatial();
                break;
            case TimeComponent::identity:
                p = p.with_identity_time();
                break;
            case TimeComponent::custom:
                if (!p.has_time_component()) {
                    throw ContractViolation("custom time component declared but a path has none");
                }
                break;
        }
    }
    f.weights_ = std::move(weights);
    f.atoms_ = std::move(paths);
    f.cumulative_.resize(f.weights_.size());
    std::partial_sum(f.weights_.begin(), f.weights_.end(), f.cumulative_.begin());
    return f;
}

CubatureFormula CubatureFormula::generative(std::string name, int order, int d, TimeComponent time,
                                            PathSampler sampler) {
    if (order < 1) throw ContractViolation("cubature order must be positive");
    if (d < 1) throw ContractViolation("cubature dimension must be positive");
    if (!sampler) throw ContractViolation("generative formula needs a sampler");
    CubatureFormula f;
    f.name_ = std::move(name);
    f.order_ = order;
    f.d_ = d;
    f.time_ = time;
    f.sampler_ = std::move(sampler);
    return f;
}

std::size_t CubatureFormula::draw_index(Rng& rng) const {
    if (!is_discrete()) throw UnsupportedMode("draw_index on a generative formula");
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
}

PiecewiseLinearPath CubatureFormula::draw(Rng& rng) const {
    if (is_discrete()) return atoms_[draw_index(rng)];
    return sampler_(rng);
}

CubatureFormula degree3_formula(int d) {
    if (d < 1) throw ContractViolation("degree3_formula: d must be positive");
    const double r = std::sqrt(static_cast<double>(d));
    std::vector<double> weights;
    std::vector<PiecewiseLinearPath> paths;
    for (int i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> inc(static_cast<std::size_t>(d), 0.0);
            inc[static_cast<std::size_t>(i)] = sign * r;
            paths.push_back(PiecewiseLinearPath::line(inc));
            weights.push_back(1.0 / (2.0 * d));
        }
    }
    return CubatureFormula::discrete("deg3", 3, d, std::move(weights), std::move(paths), TimeComponent::identity);
}

CubatureFormula wong_zakai_formula(int d) {
    if (d < 1) throw ContractViolation("wong_zakai_formula: d must be positive");
    return CubatureFormula::generative("wz", 3, d, TimeComponent::identity, [d](Rng& rng) {
        std::vector<double> z(static_cast<std::size_t>(d));
        for (double& v : z) v = standard_normal(rng);
        return PiecewiseLinearPath::line(z, 1.0, 1.0);
    });
}

CubatureFormula ninomiya_victoir_formula(int d) {
    if (d < 1) throw ContractViolation("ninomiya_victoir_formula: d must be positive");
    return CubatureFormula::generative("nv", 5, d, TimeComponent::custom, [d](Rng& rng) {
        const auto dd = static_cast<std::size_t>(d);
        const double eps = 1.0 / (d + 1);
        const bool increasing = rademacher(rng) < 0;  // Lambda = -1: coordinates 1..d in order
        std::vector<double> z(dd);
        for (double& v : z) v = standard_normal(rng);

        // Subintervals: [0, eps/2], d blocks of length eps, [1 - eps/2, 1].
        const std::size_t nodes = dd + 3;
        std::vector<double> bp(nodes);
        bp[0] = 0.0;
        for (std::size_t j = 1; j <= dd + 1; ++j) bp[j] = eps / 2 + static_cast<double>(j - 1) * eps;
        bp[nodes - 1] = 1.0;

        std::vector<double> values(nodes * dd, 0.0);
        std::vector<double> h(nodes, 0.0);
        h[1] = 0.5;
        std::vector<double> x(dd, 0.0);
        for (std::size_t j = 0; j < dd; ++j) {
            const std::size_t coord = increasing ? j : dd - 1 - j;
            x[coord] += z[coord];
            std::copy(x.begin(), x.end(), values.begin() + static_cast<std::ptrdiff_t>((j + 2) * dd));
            h[j + 2] = 0.5;
        }
        std::copy(x.begin(), x.end(), values.begin() + static_cast<std::ptrdiff_t>((nodes - 1) * dd));
        h[nodes - 1] = 1.0;
        return PiecewiseLinearPath(d, std::move(bp), std::move(values), std::move(h));
    });
}

TensorSeries expected_brownian_signature(Alphabet alphabet, int m) {
    TensorSeries x(alphabet, m);
    if (alphabet.has_time_letter) x.set_coefficient({0}, 1.0);
    if (m >= 2) {
        for (int i = 1; i <= alphabet.d; ++i) x.set_coefficient({i, i}, 0.5);
    }
    return series_exp(x);
}

// ---------------------------------------------------------------------------
// Moment checks

bool MomentReport::passed() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const MomentRow& r) { return r.pass; });
}

double MomentReport::max_abs_diff() const noexcept {
    double out = 0.0;
    for (const auto& r : rows) out = std::max(out, std::abs(r.diff));
    return out;
}

const MomentRow* MomentReport::find(std::initializer_list<int> word) const noexcept {
    for (const auto& r : rows) {
        if (std::equal(r.word.begin(), r.word.end(), word.begin(), word.end())) return &r;
    }
    return nullptr;
}

std::string word_to_string(std::span<const int> word) {
    if (word.empty()) return "empty";
    std::string out;
    for (int l : word) out += std::to_string(l);
    return out;
}

namespace {

PiecewiseLinearPath adapt_time(const PiecewiseLinearPath& p, bool time_letter) {
    if (!time_letter && p.has_time_component()) return p.spatial();
    return p;
}

}  // namespace

MomentReport check_moments(const CubatureFormula& formula, const MomentCheckOptions& options) {
    const bool time_letter = options.time_letter.value_or(formula.time_component() != TimeComponent::none);
    if (time_letter && formula.time_component() == TimeComponent::none) {
        throw ContractViolation("check_moments: time letter requested but the formula has no time component");
    }
    const Alphabet alphabet{formula.dimension(), time_letter};
    const int m = options.m;
    const TensorSeries target = expected_brownian_signature(alphabet, m);
    TensorSeries mean(alphabet, m);
    TensorSeries err(alphabet, m);
    std::size_t samples = 0;

    if (options.mode == MomentMode::exact) {
        if (!formula.is_discrete()) {
            throw UnsupportedMode("exact moment check requires a discrete formula");
        }
        const auto n = mean.coefficients().size();
        std::vector<CompensatedSum> sums(n);
        for (std::size_t j = 0; j < formula.atoms().size(); ++j) {
            const auto sig = signature(adapt_time(formula.atoms()[j], time_letter), m);
            const auto c = sig.series().coefficients();
            const double w = formula.weights()[j];
            for (std::size_t i = 0; i < n; ++i) sums[i].add(w * c[i]);
        }
        auto out = mean.coefficients();
        for (std::size_t i = 0; i < n; ++i) out[i] = sums[i].value();
        samples = formula.atoms().size();
    } else {
        if (options.samples < 2) throw ContractViolation("check_moments: MC mode needs at least 2 samples");
        const auto n = mean.coefficients().size();
        constexpr std::size_t kChunk = 8192;
        auto partials = run_chunks(options.samples, kChunk, options.workers,
                                   [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                                       Rng rng = make_rng(options.seed, chunk);
                                       VectorStats acc(n);
                                       for (std::size_t s = begin; s < end; ++s) {
                                           const auto sig = signature(adapt_time(formula.draw(rng), time_letter), m);
                                           acc.add(sig.series().coefficients());
                                       }
                                       return acc;
                                   });
        VectorStats total(n);
        for (const auto& p : partials) total.merge(p);
        auto mo = mean.coefficients();
        auto eo = err.coefficients();
        for (std::size_t i = 0; i < n; ++i) {
            mo[i] = total.mean(i);
            eo[i] = total.stderr_of_mean(i);
        }
        samples = options.samples;
    }

    MomentReport report{alphabet, m, options.mode, samples, {}, mean, err};
    for (int k = 0; k <= m; ++k) {
        const auto tl = target.level(k);
        const auto ml = mean.level(k);
        const auto el = err.level(k);
        for (std::size_t w = 0; w < tl.size(); ++w) {
            const int deg = target.degree(k, w);
            if (deg > m) continue;
            MomentRow row;
            row.word = target.word(k, w);
            row.degree = deg;
            row.cubature = ml[w];
            row.target = tl[w];
            row.diff = ml[w] - tl[w];
            row.stderr_ = el[w];
            const double allowed =
                options.mode == MomentMode::exact ? options.tol : std::max(options.tol, 4.0 * el[w]);
            row.pass = std::abs(row.diff) <= allowed;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace cubature
