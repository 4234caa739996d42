#include "cubature/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cubature/error.hpp"

namespace cubature {

PiecewiseLinearPath::PiecewiseLinearPath(int d, std::vector<double> breakpoints, std::vector<double> nodes,
                                         std::optional<std::vector<double>> time_values)
    : d_(d), breakpoints_(std::move(breakpoints)), nodes_(std::move(nodes)), time_(std::move(time_values)) {
    if (d_ < 1) throw ContractViolation("path dimension must be positive");
    if (breakpoints_.empty()) throw ContractViolation("path needs at least one breakpoint");
    if (breakpoints_.front() != 0.0) throw ContractViolation("path breakpoints must start at 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) {
            throw ContractViolation("path breakpoints must be strictly increasing (at index " +
                                    std::to_string(i) + ")");
        }
    }
    if (nodes_.size() != breakpoints_.size() * static_cast<std::size_t>(d_)) {
        throw ContractViolation("path node array has wrong size");
    }
    for (int i = 0; i < d_; ++i) {
        if (nodes_[static_cast<std::size_t>(i)] != 0.0) throw ContractViolation("path must start at 0");
    }
    if (!std::all_of(nodes_.begin(), nodes_.end(), [](double v) { return std::isfinite(v); })) {
        throw ContractViolation("path node values must be finite");
    }
    if (time_) {
        if (time_->size() != breakpoints_.size()) {
            throw ContractViolation("time component must have one value per breakpoint");
        }
        if (time_->front() != 0.0) throw ContractViolation("time component must satisfy h(0) = 0");
        if (!std::all_of(time_->begin(), time_->end(), [](double v) { return std::isfinite(v); })) {
            throw ContractViolation("time component values must be finite");
        }
    }
}

PiecewiseLinearPath PiecewiseLinearPath::empty(int d, bool with_time) {
    std::optional<std::vector<double>> h;
    if (with_time) h = std::vector<double>{0.0};
    return PiecewiseLinearPath(d, {0.0}, std::vector<double>(static_cast<std::size_t>(d), 0.0), std::move(h));
}

PiecewiseLinearPath PiecewiseLinearPath::line(std::span<const double> increment, double duration,
                                              std::optional<double> time_increment) {
    if (!(duration > 0.0)) throw ContractViolation("line duration must be positive");
    const auto d = static_cast<int>(increment.size());
    std::vector<double> nodes(2 * increment.size(), 0.0);
    std::copy(increment.begin(), increment.end(), nodes.begin() + static_cast<std::ptrdiff_t>(increment.size()));
    std::optional<std::vector<double>> h;
    if (time_increment) h = std::vector<double>{0.0, *time_increment};
    return PiecewiseLinearPath(d, {0.0, duration}, std::move(nodes), std::move(h));
}

std::vector<double> PiecewiseLinearPath::value_at(double s) const {
    const auto dd = static_cast<std::size_t>(d_);
    if (s <= 0.0) return std::vector<double>(dd, 0.0);
    if (s >= duration()) {
        const auto e = end_value();
        return {e.begin(), e.end()};
    }
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    const auto hi = static_cast<std::size_t>(it - breakpoints_.begin());
    const auto lo = hi - 1;
    std::vector<double> out(dd);
    if (breakpoints_[lo] == s) {
        const auto n = node(lo);
        std::copy(n.begin(), n.end(), out.begin());
        return out;
    }
    const double w = (s - breakpoints_[lo]) / (breakpoints_[hi] - breakpoints_[lo]);
    const auto a = node(lo);
    const auto b = node(hi);
    for (std::size_t i = 0; i < dd; ++i) out[i] = a[i] + w * (b[i] - a[i]);
    return out;
}

double PiecewiseLinearPath::time_at(double s) const {
    if (!time_) return 0.0;
    if (s <= 0.0) return 0.0;
    if (s >= duration()) return time_->back();
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    const auto hi = static_cast<std::size_t>(it - breakpoints_.begin());
    const auto lo = hi - 1;
    if (breakpoints_[lo] == s) return (*time_)[lo];
    const double w = (s - breakpoints_[lo]) / (breakpoints_[hi] - breakpoints_[lo]);
    return (*time_)[lo] + w * ((*time_)[hi] - (*time_)[lo]);
}

double PiecewiseLinearPath::time_lipschitz() const noexcept {
    if (!time_) return 0.0;
    double out = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        out = std::max(out, std::abs((*time_)[i + 1] - (*time_)[i]) / (breakpoints_[i + 1] - breakpoints_[i]));
    }
    return out;
}

PiecewiseLinearPath PiecewiseLinearPath::spatial() const { return PiecewiseLinearPath(d_, breakpoints_, nodes_); }

PiecewiseLinearPath PiecewiseLinearPath::with_identity_time() const {
    return PiecewiseLinearPath(d_, breakpoints_, nodes_, breakpoints_);
}

std::optional<std::size_t> PiecewiseLinearPath::breakpoint_index(double s) const noexcept {
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), s);
    if (it == breakpoints_.end() || *it != s) return std::nullopt;
    return static_cast<std::size_t>(it - breakpoints_.begin());
}

Alphabet path_alphabet(const PiecewiseLinearPath& path) noexcept {
    return Alphabet{path.dimension(), path.has_time_component()};
}

namespace {

// Letter-indexed increment of segment i scaled by `fraction` of its length.
void segment_increment(const PiecewiseLinearPath& path, std::size_t i, double fraction, std::vector<double>& out) {
    const auto d = static_cast<std::size_t>(path.dimension());
    const std::size_t shift = path.has_time_component() ? 1 : 0;
    out.assign(d + shift, 0.0);
    const auto a = path.node(i);
    const auto b = path.node(i + 1);
    if (shift) {
        const double dh = path.time_value(i + 1) - path.time_value(i);
        out[0] = fraction == 1.0 ? dh : dh * fraction;
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double dx = b[j] - a[j];
        out[j + shift] = fraction == 1.0 ? dx : dx * fraction;
    }
}

}  // namespace

GroupElement signature_between(const PiecewiseLinearPath& path, int m, std::size_t first, std::size_t last) {
    if (first > last || last >= path.num_nodes()) {
        throw ContractViolation("signature_between: invalid breakpoint range");
    }
    TensorSeries s = TensorSeries::unit(path_alphabet(path), m);
    std::vector<double> inc;
    for (std::size_t i = first; i < last; ++i) {
        segment_increment(path, i, 1.0, inc);
        mul_exp_inplace(s, inc);
    }
    return GroupElement(std::move(s));
}

GroupElement signature(const PiecewiseLinearPath& path, int m) {
    if (m < 1) throw ContractViolation("signature level must be at least 1");
    return signature_between(path, m, 0, path.num_nodes() - 1);
}

GroupElement signature(const PiecewiseLinearPath& path, int m, double s, double t) {
    if (s > t) throw ContractViolation("signature: interval start after end");
    if (s < 0.0 || t > path.duration()) throw ContractViolation("signature: interval outside path domain");
    const auto first = path.breakpoint_index(s);
    const auto last = path.breakpoint_index(t);
    if (first && last) return signature_between(path, m, *first, *last);

    TensorSeries out = TensorSeries::unit(path_alphabet(path), m);
    const auto bp = path.breakpoints();
    std::vector<double> inc;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double lo = std::max(s, bp[i]);
        const double hi = std::min(t, bp[i + 1]);
        if (!(hi > lo)) continue;
        const double len = bp[i + 1] - bp[i];
        const double fraction = (lo == bp[i] && hi == bp[i + 1]) ? 1.0 : (hi - lo) / len;
        segment_increment(path, i, fraction, inc);
        mul_exp_inplace(out, inc);
    }
    return GroupElement(std::move(out));
}

PiecewiseLinearPath rescale(const PiecewiseLinearPath& path, double dt) {
    if (!(dt > 0.0)) throw ContractViolation("rescale: dt must be positive");
    const double root = std::sqrt(dt);
    std::vector<double> bp(path.breakpoints().begin(), path.breakpoints().end());
    for (double& b : bp) b *= dt;
    std::vector<double> nodes(path.nodes().begin(), path.nodes().end());
    for (double& v : nodes) v *= root;
    std::optional<std::vector<double>> h;
    if (path.has_time_component()) {
        h.emplace(path.time_values().begin(), path.time_values().end());
        for (double& v : *h) v *= dt;
    }
    return PiecewiseLinearPath(path.dimension(), std::move(bp), std::move(nodes), std::move(h));
}

PiecewiseLinearPath concatenate(std::span<const PiecewiseLinearPath> parts) {
    if (parts.empty()) return PiecewiseLinearPath::empty(1);
    const int d = parts.front().dimension();
    const bool with_time = parts.front().has_time_component();
    double total = 0.0;
    std::size_t count = 1;
    for (const auto& p : parts) {
        if (p.dimension() != d) throw ContractViolation("concatenate: dimension mismatch");
        if (p.has_time_component() != with_time) {
            throw ContractViolation("concatenate: parts disagree on the time component");
        }
        total += p.duration();
        count += p.num_segments();
    }
    const double merge_tol = 1e-15 * total;
    const auto dd = static_cast<std::size_t>(d);

    std::vector<double> bp{0.0};
    std::vector<double> nodes(dd, 0.0);
    std::vector<double> h{0.0};
    bp.reserve(count);
    nodes.reserve(count * dd);
    h.reserve(count);

    for (const auto& p : parts) {
        const double t0 = bp.back();
        const std::vector<double> x0(nodes.end() - static_cast<std::ptrdiff_t>(dd), nodes.end());
        const double h0 = h.back();
        for (std::size_t i = 1; i < p.num_nodes(); ++i) {
            const double b = t0 + p.breakpoints()[i];
            const auto v = p.node(i);
            const double hv = h0 + p.time_value(i);
            if (b - bp.back() <= merge_tol) {
                if (bp.size() == 1) continue;
                bp.back() = b;
                for (std::size_t j = 0; j < dd; ++j) nodes[nodes.size() - dd + j] = x0[j] + v[j];
                h.back() = hv;
                continue;
            }
            bp.push_back(b);
            for (std::size_t j = 0; j < dd; ++j) nodes.push_back(x0[j] + v[j]);
            h.push_back(hv);
        }
    }
    std::optional<std::vector<double>> hopt;
    if (with_time) hopt = std::move(h);
    return PiecewiseLinearPath(d, std::move(bp), std::move(nodes), std::move(hopt));
}

PiecewiseLinearPath reverse(const PiecewiseLinearPath& path) {
    const auto n = path.num_nodes();
    const auto dd = static_cast<std::size_t>(path.dimension());
    const double total = path.duration();
    const auto end = path.end_value();
    const double hend = path.time_value(n - 1);
    std::vector<double> bp(n);
    std::vector<double> nodes(n * dd);
    std::vector<double> h(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = n - 1 - j;
        bp[j] = j == 0 ? 0.0 : total - path.breakpoints()[src];
        const auto v = path.node(src);
        for (std::size_t i = 0; i < dd; ++i) nodes[j * dd + i] = j == 0 ? 0.0 : v[i] - end[i];
        h[j] = j == 0 ? 0.0 : path.time_value(src) - hend;
    }
    std::optional<std::vector<double>> hopt;
    if (path.has_time_component()) hopt = std::move(h);
    return PiecewiseLinearPath(path.dimension(), std::move(bp), std::move(nodes), std::move(hopt));
}

namespace {

template <class Accumulate>
void for_each_overlap(const PiecewiseLinearPath& path, double s, double t, Accumulate&& acc) {
    if (s > t) throw ContractViolation("interval start after end");
    if (s < 0.0 || t > path.duration()) throw ContractViolation("interval outside path domain");
    const auto bp = path.breakpoints();
    const auto dd = static_cast<std::size_t>(path.dimension());
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double lo = std::max(s, bp[i]);
        const double hi = std::min(t, bp[i + 1]);
        if (!(hi > lo)) continue;
        const double len = bp[i + 1] - bp[i];
        const auto a = path.node(i);
        const auto b = path.node(i + 1);
        double speed_sq = 0.0;
        for (std::size_t j = 0; j < dd; ++j) {
            const double slope = (b[j] - a[j]) / len;
            speed_sq += slope * slope;
        }
        acc(speed_sq, hi - lo);
    }
}

}  // namespace

double cameron_martin_norm(const PiecewiseLinearPath& path, double s, double t) {
    double energy = 0.0;
    for_each_overlap(path, s, t, [&](double speed_sq, double len) { energy += speed_sq * len; });
    return std::sqrt(energy);
}

double cameron_martin_norm(const PiecewiseLinearPath& path) {
    return cameron_martin_norm(path, 0.0, path.duration());
}

double one_variation(const PiecewiseLinearPath& path, double s, double t) {
    double total = 0.0;
    for_each_overlap(path, s, t, [&](double speed_sq, double len) { total += std::sqrt(speed_sq) * len; });
    return total;
}

double one_variation(const PiecewiseLinearPath& path) { return one_variation(path, 0.0, path.duration()); }

}  // namespace cubature
