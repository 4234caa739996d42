#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace cubature {

inline constexpr int kMaxLevel = 6;
inline constexpr int kMaxDimension = 6;

/// Letters of the tensor algebra. Spatial letters are 1..d; when
/// `has_time_letter` is set there is an extra letter 0 of grading weight 2.
///
/// Internally letters are addressed by a dense index 0..size()-1 in
/// increasing letter order, so index == letter with a time letter and
/// index == letter - 1 without.
struct Alphabet {
    int d = 1;
    bool has_time_letter = false;

    int size() const noexcept { return d + (has_time_letter ? 1 : 0); }
    int letter(int index) const noexcept { return has_time_letter ? index : index + 1; }
    int index(int letter) const;
    int weight(int index) const noexcept { return (has_time_letter && index == 0) ? 2 : 1; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

namespace detail {
struct Layout;
}

/// Element of the truncated tensor algebra T^m over an Alphabet.
///
/// Coefficients are stored densely per word length k = 0..m (A^k entries at
/// length k, lexicographic in letter order). A word w is retained only when
/// its graded degree |w| + #{time letters in w} is at most m; slots of words
/// above the cap exist in storage but are always zero.
class TensorSeries {
public:
    TensorSeries(Alphabet alphabet, int level_cap);

    static TensorSeries unit(Alphabet alphabet, int level_cap);

    const Alphabet& alphabet() const noexcept;
    int level_cap() const noexcept;

    std::size_t level_size(int length) const noexcept;
    std::span<double> level(int length) noexcept;
    std::span<const double> level(int length) const noexcept;

    /// Graded degree of the word stored at `index` within word length `length`.
    int degree(int length, std::size_t index) const noexcept;
    bool in_range(int length, std::size_t index) const noexcept {
        return degree(length, index) <= level_cap();
    }

    /// Coefficient lookup by letters (1..d, plus 0 for the time letter).
    double coefficient(std::span<const int> word) const;
    double coefficient(std::initializer_list<int> word) const;
    void set_coefficient(std::span<const int> word, double value);
    void set_coefficient(std::initializer_list<int> word, double value);

    double scalar() const noexcept { return coeffs_[0]; }
    void set_scalar(double value) noexcept { coeffs_[0] = value; }

    std::span<const double> coefficients() const noexcept { return coeffs_; }
    std::span<double> coefficients() noexcept { return coeffs_; }

    double max_abs() const noexcept;
    bool all_finite() const noexcept;
    bool same_shape(const TensorSeries& other) const noexcept;

    /// Letters of the word at (length, index).
    std::vector<int> word(int length, std::size_t index) const;

    /// Zero every slot whose graded degree exceeds the level cap.
    void truncate() noexcept;

    TensorSeries& operator+=(const TensorSeries& other);
    TensorSeries& operator-=(const TensorSeries& other);
    TensorSeries& operator*=(double factor) noexcept;

    friend TensorSeries operator+(TensorSeries a, const TensorSeries& b) { return a += b; }
    friend TensorSeries operator-(TensorSeries a, const TensorSeries& b) { return a -= b; }
    friend TensorSeries operator*(TensorSeries a, double s) { return a *= s; }
    friend TensorSeries operator*(double s, TensorSeries a) { return a *= s; }

    const detail::Layout& layout() const noexcept { return *layout_; }

private:
    std::size_t flat_index(std::span<const int> word) const;

    std::shared_ptr<const detail::Layout> layout_;
    std::vector<double> coeffs_;
};

/// Tensor series with empty-word coefficient exactly 1 (an element of G^m
/// when it is the exponential of a Lie element).
class GroupElement {
public:
    explicit GroupElement(TensorSeries series);

    static GroupElement unit(Alphabet alphabet, int level_cap);

    const TensorSeries& series() const noexcept { return series_; }
    TensorSeries&& release() && noexcept { return std::move(series_); }
    const Alphabet& alphabet() const noexcept { return series_.alphabet(); }
    int level_cap() const noexcept { return series_.level_cap(); }

private:
    TensorSeries series_;
};

/// Tensor series with zero empty-word coefficient, expected to lie in the
/// free Lie algebra. For m = 2 the level-1 part is x and the level-2 part is
/// the antisymmetric area matrix.
class LieElement {
public:
    explicit LieElement(TensorSeries series);

    static LieElement zero(Alphabet alphabet, int level_cap);
    /// Pure level-1 element sum_i v[i] e_{letter(i)} (v indexed by letter index).
    static LieElement from_increment(Alphabet alphabet, int level_cap, std::span<const double> v);

    const TensorSeries& series() const noexcept { return series_; }
    const Alphabet& alphabet() const noexcept { return series_.alphabet(); }
    int level_cap() const noexcept { return series_.level_cap(); }

private:
    TensorSeries series_;
};

TensorSeries tensor_mul(const TensorSeries& a, const TensorSeries& b);
GroupElement operator*(const GroupElement& a, const GroupElement& b);

/// Lie bracket [a, b] = a b - b a.
TensorSeries bracket(const TensorSeries& a, const TensorSeries& b);

/// Truncated exponential of a series with zero scalar part.
TensorSeries series_exp(const TensorSeries& x);
/// Truncated logarithm of a series with scalar part 1.
TensorSeries series_log(const TensorSeries& g);

GroupElement exp_trunc(const LieElement& x);
LieElement log_trunc(const GroupElement& g);
GroupElement inverse(const GroupElement& g);

/// exp of a pure level-1 increment, computed level by level as v^k / k!.
GroupElement exp_increment(Alphabet alphabet, int level_cap, std::span<const double> v);

/// In-place Chen step s <- s (x) exp(v) for a linear segment with increment v.
void mul_exp_inplace(TensorSeries& s, std::span<const double> v);

/// Grading automorphism: the coefficient of w is multiplied by lambda^deg(w).
TensorSeries dilate(const TensorSeries& a, double lambda);
GroupElement dilate(const GroupElement& g, double lambda);

/// max over graded degrees k of |degree-k part|^(1/k), Euclidean on coefficients.
double homogeneous_norm(const TensorSeries& g);
double homogeneous_norm(const GroupElement& g);

/// Image of log-type series under the Dynkin idempotent, applied per word
/// length: l_k -> D(l_k) / k. Fixes exactly the Lie elements.
TensorSeries lie_projection(const TensorSeries& x);

/// Euclidean distance between log(a) and its Lie projection; zero on G^m.
double group_membership_defect(const TensorSeries& a);

/// homogeneous_norm(g^-1 h).
double cc_distance(const GroupElement& g, const GroupElement& h);

/// 1e-12 scaled by the largest coefficient magnitude (at least 1).
double default_tolerance(const TensorSeries& a) noexcept;

}  // namespace cubature
