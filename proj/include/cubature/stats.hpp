#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cubature {

/// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Welford mean/variance accumulator with Chan's pairwise merge.
class RunningStats {
public:
    void add(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    void merge(const RunningStats& o) noexcept;

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stderr_of_mean() const noexcept {
        return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Componentwise RunningStats over a fixed-length vector.
class VectorStats {
public:
    explicit VectorStats(std::size_t dim = 0) : n_(0), mean_(dim, 0.0), m2_(dim, 0.0) {}

    void add(std::span<const double> x) noexcept;
    void merge(const VectorStats& o);

    std::size_t count() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return mean_.size(); }
    double mean(std::size_t i) const noexcept { return mean_[i]; }
    double variance(std::size_t i) const noexcept {
        return n_ > 1 ? m2_[i] / static_cast<double>(n_ - 1) : 0.0;
    }
    double stderr_of_mean(std::size_t i) const noexcept {
        return n_ > 1 ? std::sqrt(variance(i) / static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

double normal_cdf(double x) noexcept;

/// sup |F_n - F| for the empirical distribution of `sorted` (ascending).
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov tail probability for statistic D at sample size n
/// (with Stephens' small-sample correction).
double ks_pvalue(double statistic, std::size_t n) noexcept;

/// Ordinary least-squares slope of y on x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Empirical quantile of ascending `sorted` (nearest-rank).
double empirical_quantile(std::span<const double> sorted, double q);

/// Distribution-free confidence band for the q-quantile from order statistics:
/// ranks q*n -/+ z*sqrt(n q (1-q)).
struct QuantileBand {
    double lower = 0.0;
    double estimate = 0.0;
    double upper = 0.0;
};
QuantileBand quantile_band(std::span<const double> sorted, double q, double z = 3.0);

}  // namespace cubature
