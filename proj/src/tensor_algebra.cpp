#include "cubature/tensor_algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include "cubature/error.hpp"

namespace cubature {

int Alphabet::index(int letter) const {
    const int idx = has_time_letter ? letter : letter - 1;
    if (idx < 0 || idx >= size()) {
        throw ContractViolation("letter " + std::to_string(letter) + " is not in the alphabet");
    }
    return idx;
}

namespace detail {

struct Layout {
    Alphabet alphabet;
    int m = 0;
    int letters = 0;
    std::vector<std::size_t> offset;  // m + 2 entries
    std::vector<std::size_t> size;    // m + 1 entries
    std::vector<std::uint8_t> degree; // per flat slot
    bool graded = false;
};

namespace {

std::shared_ptr<const Layout> build_layout(Alphabet alphabet, int m) {
    auto layout = std::make_shared<Layout>();
    layout->alphabet = alphabet;
    layout->m = m;
    layout->letters = alphabet.size();
    layout->graded = alphabet.has_time_letter;
    layout->offset.resize(m + 2);
    layout->size.resize(m + 1);
    std::size_t total = 0;
    std::size_t width = 1;
    for (int k = 0; k <= m; ++k) {
        layout->offset[k] = total;
        layout->size[k] = width;
        total += width;
        width *= static_cast<std::size_t>(layout->letters);
    }
    layout->offset[m + 1] = total;
    layout->degree.assign(total, 0);
    for (int k = 1; k <= m; ++k) {
        const auto prev = layout->offset[k - 1];
        const auto cur = layout->offset[k];
        for (std::size_t u = 0; u < layout->size[k - 1]; ++u) {
            for (int a = 0; a < layout->letters; ++a) {
                layout->degree[cur + u * layout->letters + a] =
                    static_cast<std::uint8_t>(layout->degree[prev + u] + alphabet.weight(a));
            }
        }
    }
    return layout;
}

constexpr std::size_t kSlots = (kMaxDimension + 1) * 2 * (kMaxLevel + 1);
std::array<std::once_flag, kSlots> layout_once;
std::array<std::shared_ptr<const Layout>, kSlots> layout_cache;

std::shared_ptr<const Layout> layout_for(Alphabet alphabet, int m) {
    if (alphabet.d < 1 || alphabet.d > kMaxDimension) {
        throw ContractViolation("alphabet dimension must be in [1, " + std::to_string(kMaxDimension) +
                                "], got " + std::to_string(alphabet.d));
    }
    if (m < 1 || m > kMaxLevel) {
        throw ContractViolation("level cap must be in [1, " + std::to_string(kMaxLevel) + "], got " +
                                std::to_string(m));
    }
    const std::size_t slot =
        (static_cast<std::size_t>(alphabet.d) * 2 + (alphabet.has_time_letter ? 1 : 0)) * (kMaxLevel + 1) +
        static_cast<std::size_t>(m);
    std::call_once(layout_once[slot], [&] { layout_cache[slot] = build_layout(alphabet, m); });
    return layout_cache[slot];
}

void require_same_shape(const TensorSeries& a, const TensorSeries& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ContractViolation(std::string(op) + ": alphabet or level cap mismatch");
    }
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// TensorSeries

TensorSeries::TensorSeries(Alphabet alphabet, int level_cap)
    : layout_(detail::layout_for(alphabet, level_cap)), coeffs_(layout_->offset.back(), 0.0) {}

TensorSeries TensorSeries::unit(Alphabet alphabet, int level_cap) {
    TensorSeries s(alphabet, level_cap);
    s.coeffs_[0] = 1.0;
    return s;
}

const Alphabet& TensorSeries::alphabet() const noexcept { return layout_->alphabet; }
int TensorSeries::level_cap() const noexcept { return layout_->m; }

std::size_t TensorSeries::level_size(int length) const noexcept { return layout_->size[length]; }

std::span<double> TensorSeries::level(int length) noexcept {
    return {coeffs_.data() + layout_->offset[length], layout_->size[length]};
}

std::span<const double> TensorSeries::level(int length) const noexcept {
    return {coeffs_.data() + layout_->offset[length], layout_->size[length]};
}

int TensorSeries::degree(int length, std::size_t index) const noexcept {
    return layout_->degree[layout_->offset[length] + index];
}

std::size_t TensorSeries::flat_index(std::span<const int> word) const {
    const int k = static_cast<int>(word.size());
    if (k > layout_->m) {
        throw ContractViolation("word longer than the level cap");
    }
    std::size_t idx = 0;
    for (int letter : word) {
        idx = idx * static_cast<std::size_t>(layout_->letters) + static_cast<std::size_t>(alphabet().index(letter));
    }
    return layout_->offset[k] + idx;
}

double TensorSeries::coefficient(std::span<const int> word) const {
    const auto flat = flat_index(word);
    return layout_->degree[flat] <= layout_->m ? coeffs_[flat] : 0.0;
}

double TensorSeries::coefficient(std::initializer_list<int> word) const {
    return coefficient(std::span<const int>(word.begin(), word.size()));
}

void TensorSeries::set_coefficient(std::span<const int> word, double value) {
    const auto flat = flat_index(word);
    if (layout_->degree[flat] > layout_->m) {
        throw ContractViolation("word exceeds the graded truncation");
    }
    coeffs_[flat] = value;
}

void TensorSeries::set_coefficient(std::initializer_list<int> word, double value) {
    set_coefficient(std::span<const int>(word.begin(), word.size()), value);
}

double TensorSeries::max_abs() const noexcept {
    double out = 0.0;
    for (double c : coeffs_) out = std::max(out, std::abs(c));
    return out;
}

bool TensorSeries::all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
}

bool TensorSeries::same_shape(const TensorSeries& other) const noexcept {
    return layout_ == other.layout_;
}

std::vector<int> TensorSeries::word(int length, std::size_t index) const {
    std::vector<int> out(static_cast<std::size_t>(length));
    for (int pos = length - 1; pos >= 0; --pos) {
        out[static_cast<std::size_t>(pos)] =
            alphabet().letter(static_cast<int>(index % static_cast<std::size_t>(layout_->letters)));
        index /= static_cast<std::size_t>(layout_->letters);
    }
    return out;
}

void TensorSeries::truncate() noexcept {
    if (!layout_->graded) return;
    const auto m = static_cast<std::uint8_t>(layout_->m);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (layout_->degree[i] > m) coeffs_[i] = 0.0;
    }
}

TensorSeries& TensorSeries::operator+=(const TensorSeries& other) {
    detail::require_same_shape(*this, other, "add");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

TensorSeries& TensorSeries::operator-=(const TensorSeries& other) {
    detail::require_same_shape(*this, other, "subtract");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

TensorSeries& TensorSeries::operator*=(double factor) noexcept {
    for (double& c : coeffs_) c *= factor;
    return *this;
}

// ---------------------------------------------------------------------------
// Group / Lie wrappers

GroupElement::GroupElement(TensorSeries series) : series_(std::move(series)) {
    if (series_.scalar() != 1.0) {
        throw ContractViolation("group element must have empty-word coefficient 1");
    }
}

GroupElement GroupElement::unit(Alphabet alphabet, int level_cap) {
    return GroupElement(TensorSeries::unit(alphabet, level_cap));
}

LieElement::LieElement(TensorSeries series) : series_(std::move(series)) {
    if (series_.scalar() != 0.0) {
        throw ContractViolation("Lie element must have zero empty-word coefficient");
    }
}

LieElement LieElement::zero(Alphabet alphabet, int level_cap) {
    return LieElement(TensorSeries(alphabet, level_cap));
}

LieElement LieElement::from_increment(Alphabet alphabet, int level_cap, std::span<const double> v) {
    TensorSeries s(alphabet, level_cap);
    if (static_cast<int>(v.size()) != alphabet.size()) {
        throw ContractViolation("increment size does not match alphabet");
    }
    auto l1 = s.level(1);
    std::copy(v.begin(), v.end(), l1.begin());
    s.truncate();
    return LieElement(std::move(s));
}

// ---------------------------------------------------------------------------
// Products

TensorSeries tensor_mul(const TensorSeries& a, const TensorSeries& b) {
    detail::require_same_shape(a, b, "tensor_mul");
    const int m = a.level_cap();
    TensorSeries out(a.alphabet(), m);
    for (int k = 0; k <= m; ++k) {
        auto dst = out.level(k);
        for (int i = 0; i <= k; ++i) {
            const auto lhs = a.level(i);
            const auto rhs = b.level(k - i);
            const std::size_t stride = rhs.size();
            for (std::size_t u = 0; u < lhs.size(); ++u) {
                const double au = lhs[u];
                if (au == 0.0) continue;
                double* row = dst.data() + u * stride;
                for (std::size_t v = 0; v < stride; ++v) row[v] += au * rhs[v];
            }
        }
    }
    out.truncate();
    return out;
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(tensor_mul(a.series(), b.series()));
}

TensorSeries bracket(const TensorSeries& a, const TensorSeries& b) {
    return tensor_mul(a, b) - tensor_mul(b, a);
}

TensorSeries series_exp(const TensorSeries& x) {
    if (x.scalar() != 0.0) {
        throw ContractViolation("series_exp requires zero empty-word coefficient");
    }
    const auto unit = TensorSeries::unit(x.alphabet(), x.level_cap());
    TensorSeries r = unit;
    for (int k = x.level_cap(); k >= 1; --k) {
        r = unit + tensor_mul(x, r) * (1.0 / k);
    }
    return r;
}

TensorSeries series_log(const TensorSeries& g) {
    if (g.scalar() != 1.0) {
        throw ContractViolation("series_log requires empty-word coefficient 1");
    }
    const int m = g.level_cap();
    const auto unit = TensorSeries::unit(g.alphabet(), m);
    const TensorSeries y = g - unit;
    const auto sign = [](int k) { return (k % 2 == 1) ? 1.0 : -1.0; };
    TensorSeries r = unit * (sign(m) / m);
    for (int k = m - 1; k >= 1; --k) {
        r = unit * (sign(k) / k) + tensor_mul(y, r);
    }
    return tensor_mul(y, r);
}

GroupElement exp_trunc(const LieElement& x) { return GroupElement(series_exp(x.series())); }

LieElement log_trunc(const GroupElement& g) {
    auto l = series_log(g.series());
    l.set_scalar(0.0);
    return LieElement(std::move(l));
}

GroupElement inverse(const GroupElement& g) {
    const int m = g.level_cap();
    const auto unit = TensorSeries::unit(g.alphabet(), m);
    const TensorSeries y = g.series() - unit;
    TensorSeries r = unit;
    for (int k = 1; k <= m; ++k) r = unit - tensor_mul(y, r);
    r.set_scalar(1.0);
    return GroupElement(std::move(r));
}

GroupElement exp_increment(Alphabet alphabet, int level_cap, std::span<const double> v) {
    if (static_cast<int>(v.size()) != alphabet.size()) {
        throw ContractViolation("increment size does not match alphabet");
    }
    TensorSeries s = TensorSeries::unit(alphabet, level_cap);
    const std::size_t letters = v.size();
    for (int k = 1; k <= level_cap; ++k) {
        const auto prev = s.level(k - 1);
        auto cur = s.level(k);
        const double inv = 1.0 / k;
        for (std::size_t u = 0; u < prev.size(); ++u) {
            const double pu = prev[u] * inv;
            for (std::size_t a = 0; a < letters; ++a) cur[u * letters + a] = pu * v[a];
        }
    }
    s.truncate();
    return GroupElement(std::move(s));
}

void mul_exp_inplace(TensorSeries& s, std::span<const double> v) {
    const std::size_t letters = static_cast<std::size_t>(s.alphabet().size());
    if (v.size() != letters) {
        throw ContractViolation("increment size does not match alphabet");
    }
    const int m = s.level_cap();
    std::vector<double> t;
    std::vector<double> next;
    t.reserve(s.level_size(m));
    next.reserve(s.level_size(m));
    for (int k = m; k >= 1; --k) {
        // new_k = sum_j s_j (x) v^(k-j) / (k-j)!, evaluated Horner-style.
        const double s0 = s.level(0)[0];
        t.assign(letters, 0.0);
        for (std::size_t a = 0; a < letters; ++a) t[a] = s0 * v[a] / k;
        for (int j = 1; j < k; ++j) {
            const auto sj = s.level(j);
            const double inv = 1.0 / (k - j);
            next.assign(t.size() * letters, 0.0);
            for (std::size_t u = 0; u < t.size(); ++u) {
                const double tu = (t[u] + sj[u]) * inv;
                for (std::size_t a = 0; a < letters; ++a) next[u * letters + a] = tu * v[a];
            }
            t.swap(next);
        }
        auto sk = s.level(k);
        for (std::size_t w = 0; w < sk.size(); ++w) sk[w] += t[w];
    }
    s.truncate();
}

// ---------------------------------------------------------------------------
// Dilation and norms

TensorSeries dilate(const TensorSeries& a, double lambda) {
    if (!(lambda >= 0.0)) {
        throw ContractViolation("dilation factor must be non-negative");
    }
    const int m = a.level_cap();
    std::array<double, 2 * kMaxLevel + 1> powers{};
    powers[0] = 1.0;
    for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * lambda;
    TensorSeries out = a;
    for (int k = 0; k <= m; ++k) {
        auto lvl = out.level(k);
        for (std::size_t w = 0; w < lvl.size(); ++w) lvl[w] *= powers[static_cast<std::size_t>(a.degree(k, w))];
    }
    out.truncate();
    return out;
}

GroupElement dilate(const GroupElement& g, double lambda) { return GroupElement(dilate(g.series(), lambda)); }

double homogeneous_norm(const TensorSeries& g) {
    const int m = g.level_cap();
    std::array<double, kMaxLevel + 1> sumsq{};
    for (int k = 1; k <= m; ++k) {
        const auto lvl = g.level(k);
        for (std::size_t w = 0; w < lvl.size(); ++w) {
            const int deg = g.degree(k, w);
            if (deg <= m) sumsq[static_cast<std::size_t>(deg)] += lvl[w] * lvl[w];
        }
    }
    double out = 0.0;
    for (int k = 1; k <= m; ++k) {
        const double part = std::sqrt(sumsq[static_cast<std::size_t>(k)]);
        out = std::max(out, k == 1 ? part : std::pow(part, 1.0 / k));
    }
    return out;
}

double homogeneous_norm(const GroupElement& g) { return homogeneous_norm(g.series()); }

namespace {

// Left-normed Dynkin bracketing of a homogeneous length-k vector:
// D(u a) = [D(u), e_a], D(a) = e_a.
std::vector<double> dynkin(std::span<const double> x, int k, std::size_t letters) {
    if (k == 1) return {x.begin(), x.end()};
    const std::size_t prev_size = x.size() / letters;
    std::vector<double> out(x.size(), 0.0);
    std::vector<double> part(prev_size);
    for (std::size_t a = 0; a < letters; ++a) {
        for (std::size_t u = 0; u < prev_size; ++u) part[u] = x[u * letters + a];
        if (std::all_of(part.begin(), part.end(), [](double c) { return c == 0.0; })) continue;
        const auto y = dynkin(part, k - 1, letters);
        for (std::size_t u = 0; u < prev_size; ++u) {
            out[u * letters + a] += y[u];
            out[a * prev_size + u] -= y[u];
        }
    }
    return out;
}

}  // namespace

TensorSeries lie_projection(const TensorSeries& x) {
    TensorSeries out(x.alphabet(), x.level_cap());
    const auto letters = static_cast<std::size_t>(x.alphabet().size());
    for (int k = 1; k <= x.level_cap(); ++k) {
        const auto proj = dynkin(x.level(k), k, letters);
        auto dst = out.level(k);
        for (std::size_t w = 0; w < dst.size(); ++w) dst[w] = proj[w] / k;
    }
    out.truncate();
    return out;
}

double group_membership_defect(const TensorSeries& a) {
    TensorSeries l = series_log(a);
    l.set_scalar(0.0);
    const TensorSeries diff = l - lie_projection(l);
    double ss = 0.0;
    for (double c : diff.coefficients()) ss += c * c;
    return std::sqrt(ss);
}

double cc_distance(const GroupElement& g, const GroupElement& h) {
    return homogeneous_norm(inverse(g) * h);
}

double default_tolerance(const TensorSeries& a) noexcept { return 1e-12 * std::max(1.0, a.max_abs()); }

}  // namespace cubature
