#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubature/paths.hpp"
#include "cubature/random.hpp"
#include "cubature/tensor_algebra.hpp"

namespace cubature {

/// How the drift letter 0 is realised along a cubature path.
enum class TimeComponent {
    none,      ///< pure Brownian alphabet; drift-free SDEs only
    identity,  ///< h(s) = s
    custom,    ///< paths carry their own Lipschitz h with h(0) = 0, h(1) = 1
};

const char* to_string(TimeComponent t) noexcept;
TimeComponent time_component_from_string(const std::string& s);

using PathSampler = std::function<PiecewiseLinearPath(Rng&)>;

/// A path-valued random variable W on [0, 1] with declared order m.
///
/// Discrete formulas hold weighted atoms; generative formulas hold a sampler.
/// Every drawn path carries a time component iff time_component() != none.
class CubatureFormula {
public:
    static CubatureFormula discrete(std::string name, int order, int d, std::vector<double> weights,
                                    std::vector<PiecewiseLinearPath> paths, TimeComponent time);
    static CubatureFormula generative(std::string name, int order, int d, TimeComponent time,
                                      PathSampler sampler);

    const std::string& name() const noexcept { return name_; }
    int order() const noexcept { return order_; }
    int dimension() const noexcept { return d_; }
    TimeComponent time_component() const noexcept { return time_; }
    Alphabet alphabet() const noexcept { return Alphabet{d_, time_ != TimeComponent::none}; }
    bool is_discrete() const noexcept { return !sampler_; }

    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const PiecewiseLinearPath> atoms() const noexcept { return atoms_; }

    /// Index of a weighted atom drawn with one uniform variate (discrete only).
    std::size_t draw_index(Rng& rng) const;
    PiecewiseLinearPath draw(Rng& rng) const;

private:
    CubatureFormula() = default;

    std::string name_;
    int order_ = 0;
    int d_ = 0;
    TimeComponent time_ = TimeComponent::none;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    std::vector<PiecewiseLinearPath> atoms_;
    PathSampler sampler_;
};

/// 2d straight lines t -> t (+-sqrt(d) e_i), each of weight 1/(2d); order 3.
CubatureFormula degree3_formula(int d);
/// Line t -> t z with z ~ N(0, I_d); order 3.
CubatureFormula wong_zakai_formula(int d);
/// Ninomiya-Victoir path: half drift step, one Gaussian coordinate move per
/// subinterval (order set by a fair sign), half drift step; order 5.
CubatureFormula ninomiya_victoir_formula(int d);

/// Resolve "builtin:deg3" | "builtin:wz" | "builtin:nv" (dimension d) or a
/// discrete-formula JSON file path.
CubatureFormula formula_from_spec(const std::string& spec, int d);

/// E[S_m(B)_{0,1}] = exp(e_0 + 1/2 sum_i e_i e_i), the e_0 term only when the
/// alphabet carries the time letter.
TensorSeries expected_brownian_signature(Alphabet alphabet, int m);

enum class MomentMode { exact, monte_carlo };

struct MomentCheckOptions {
    int m = 3;
    MomentMode mode = MomentMode::exact;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    double tol = 1e-12;
    unsigned workers = 1;
    /// Check over the graded alphabet with the time letter; defaults to
    /// whether the formula declares a time component.
    std::optional<bool> time_letter;
};

struct MomentRow {
    std::vector<int> word;
    int degree = 0;
    double cubature = 0.0;
    double target = 0.0;
    double diff = 0.0;
    double stderr_ = 0.0;
    bool pass = false;
};

struct MomentReport {
    Alphabet alphabet;
    int m = 0;
    MomentMode mode = MomentMode::exact;
    std::size_t samples = 0;
    std::vector<MomentRow> rows;
    TensorSeries cubature_mean;
    TensorSeries cubature_stderr;

    bool passed() const noexcept;
    double max_abs_diff() const noexcept;
    const MomentRow* find(std::initializer_list<int> word) const noexcept;
};

/// Compare E[S_m(W)] against the Brownian expected signature word by word.
/// Exact mode sums weighted atom signatures with compensated accumulation;
/// MC mode pass rule is |diff| <= max(tol, 4 stderr).
MomentReport check_moments(const CubatureFormula& formula, const MomentCheckOptions& options);

std::string word_to_string(std::span<const int> word);

}  // namespace cubature
