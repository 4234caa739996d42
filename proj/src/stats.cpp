#include "cubature/stats.hpp"

#include <algorithm>

#include "cubature/error.hpp"

namespace cubature {

void RunningStats::merge(const RunningStats& o) noexcept {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double delta = o.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += o.m2_ + delta * delta * na * nb / n;
    n_ += o.n_;
}

void VectorStats::add(std::span<const double> x) noexcept {
    ++n_;
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double delta = x[i] - mean_[i];
        mean_[i] += delta * inv;
        m2_[i] += delta * (x[i] - mean_[i]);
    }
}

void VectorStats::merge(const VectorStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    if (o.mean_.size() != mean_.size()) throw ContractViolation("VectorStats::merge: dimension mismatch");
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double delta = o.mean_[i] - mean_[i];
        mean_[i] += delta * nb / n;
        m2_[i] += o.m2_[i] + delta * delta * na * nb / n;
    }
    n_ += o.n_;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        // Treat ties as a single jump of the empirical CDF.
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double f = cdf(sorted[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(j) / n - f));
        i = j;
    }
    return d;
}

double ks_pvalue(double statistic, std::size_t n) noexcept {
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ContractViolation("least_squares_slope needs at least two paired points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ContractViolation("least_squares_slope: degenerate abscissae");
    return sxy / sxx;
}

double empirical_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ContractViolation("empirical_quantile of empty sample");
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

QuantileBand quantile_band(std::span<const double> sorted, double q, double z) {
    if (sorted.empty()) throw ContractViolation("quantile_band of empty sample");
    const auto n = static_cast<double>(sorted.size());
    const double spread = z * std::sqrt(n * q * (1.0 - q));
    const auto at = [&](double rank) {
        const auto r = static_cast<std::size_t>(std::clamp(std::ceil(rank), 1.0, n));
        return sorted[r - 1];
    };
    return {at(q * n - spread), empirical_quantile(sorted, q), at(q * n + spread)};
}

}  // namespace cubature
