#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cubature/tensor_algebra.hpp"

namespace cubature {

/// Continuous piecewise-linear path in R^d, started at 0, with an optional
/// scalar time component h sharing the same breakpoints.
///
/// Node values are stored rather than slopes; slopes are derived per segment.
class PiecewiseLinearPath {
public:
    /// Validates: breakpoints strictly increasing starting at 0, nodes of
    /// size breakpoints.size() * d with the first node zero, and h (if given)
    /// of size breakpoints.size() with h[0] == 0.
    PiecewiseLinearPath(int d, std::vector<double> breakpoints, std::vector<double> nodes,
                        std::optional<std::vector<double>> time_values = std::nullopt);

    /// Degenerate path consisting of the single point 0 at time 0.
    static PiecewiseLinearPath empty(int d, bool with_time = false);
    /// s -> (s / duration) * increment on [0, duration]; the time component,
    /// when requested, is h(s) = (s / duration) * time_increment.
    static PiecewiseLinearPath line(std::span<const double> increment, double duration = 1.0,
                                    std::optional<double> time_increment = std::nullopt);

    int dimension() const noexcept { return d_; }
    std::size_t num_segments() const noexcept { return breakpoints_.size() - 1; }
    std::size_t num_nodes() const noexcept { return breakpoints_.size(); }
    double duration() const noexcept { return breakpoints_.back(); }
    bool has_time_component() const noexcept { return time_.has_value(); }

    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    std::span<const double> node(std::size_t i) const noexcept {
        return {nodes_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
    }
    std::span<const double> nodes() const noexcept { return nodes_; }
    /// Time component values at the breakpoints (empty span when absent).
    std::span<const double> time_values() const noexcept {
        return time_ ? std::span<const double>(*time_) : std::span<const double>();
    }
    double time_value(std::size_t i) const noexcept { return time_ ? (*time_)[i] : 0.0; }

    std::span<const double> end_value() const noexcept { return node(num_nodes() - 1); }

    /// Spatial value at s (linear interpolation, exact at breakpoints).
    std::vector<double> value_at(double s) const;
    /// Time component at s; 0 when absent.
    double time_at(double s) const;

    /// Max |slope| of the time component; 0 when absent.
    double time_lipschitz() const noexcept;

    /// Same path without the time component.
    PiecewiseLinearPath spatial() const;
    /// Same spatial path with time component h(s) = s.
    PiecewiseLinearPath with_identity_time() const;

    /// Index of the breakpoint equal to s, if any.
    std::optional<std::size_t> breakpoint_index(double s) const noexcept;

private:
    int d_;
    std::vector<double> breakpoints_;
    std::vector<double> nodes_;
    std::optional<std::vector<double>> time_;
};

/// Alphabet in which signatures of `path` live (time letter iff h is present).
Alphabet path_alphabet(const PiecewiseLinearPath& path) noexcept;

/// Step-m signature: ordered product of exp(segment increment) over segments,
/// with the time increment on letter 0 when the path carries h.
GroupElement signature(const PiecewiseLinearPath& path, int m);
/// Signature of the restriction to [s, t].
GroupElement signature(const PiecewiseLinearPath& path, int m, double s, double t);
/// Signature over the breakpoint index range [first, last].
GroupElement signature_between(const PiecewiseLinearPath& path, int m, std::size_t first, std::size_t last);

/// Spatial part scaled by sqrt(dt), time component by dt, breakpoints by dt.
PiecewiseLinearPath rescale(const PiecewiseLinearPath& path, double dt);

/// Concatenation; every part must start at 0 and parts must agree on the
/// presence of a time component.
PiecewiseLinearPath concatenate(std::span<const PiecewiseLinearPath> parts);

/// s -> path(T - s) - path(T), a path whose signature is the inverse.
PiecewiseLinearPath reverse(const PiecewiseLinearPath& path);

/// sqrt(int_s^t |w'(u)|^2 du) over spatial components.
double cameron_martin_norm(const PiecewiseLinearPath& path);
double cameron_martin_norm(const PiecewiseLinearPath& path, double s, double t);

/// int_s^t |w'(u)| du over spatial components.
double one_variation(const PiecewiseLinearPath& path);
double one_variation(const PiecewiseLinearPath& path, double s, double t);

}  // namespace cubature
