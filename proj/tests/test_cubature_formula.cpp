#include <gtest/gtest.h>

#include <cmath>

#include "cubature/cubature_formula.hpp"
#include "cubature/error.hpp"
#include "test_util.hpp"

using namespace cubature;

TEST(ExpectedSignature, KnownCoefficients) {
    const auto s = expected_brownian_signature(Alphabet{1, true}, 4);
    EXPECT_DOUBLE_EQ(s.coefficient({0}), 1.0);
    EXPECT_DOUBLE_EQ(s.coefficient({1, 1}), 0.5);
    EXPECT_DOUBLE_EQ(s.coefficient({1}), 0.0);
    EXPECT_DOUBLE_EQ(s.coefficient({0, 1, 1}), 0.25);
    EXPECT_DOUBLE_EQ(s.coefficient({1, 1, 0}), 0.25);
    EXPECT_DOUBLE_EQ(s.coefficient({1, 0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(s.coefficient({1, 1, 1, 1}), 0.125);
    EXPECT_DOUBLE_EQ(s.coefficient({0, 0}), 0.5);
}

TEST(Discrete, ValidatesWeights) {
    const double v[] = {1.0};
    std::vector<PiecewiseLinearPath> two = {PiecewiseLinearPath::line(v), PiecewiseLinearPath::line(v)};
    EXPECT_THROW(CubatureFormula::discrete("x", 3, 1, {0.5, 0.4}, two, TimeComponent::none), ContractViolation);
    EXPECT_THROW(CubatureFormula::discrete("x", 3, 1, {1.0, 0.0}, two, TimeComponent::none), ContractViolation);
    EXPECT_THROW(CubatureFormula::discrete("x", 3, 1, {1.0}, two, TimeComponent::none), ContractViolation);
    const std::vector<PiecewiseLinearPath> longer = {PiecewiseLinearPath::line(v, 2.0)};
    EXPECT_THROW(CubatureFormula::discrete("x", 3, 1, {1.0}, longer, TimeComponent::none), ContractViolation);
    EXPECT_THROW(CubatureFormula::discrete("x", 3, 1, {1.0}, {PiecewiseLinearPath::line(v)}, TimeComponent::custom),
                 ContractViolation);
}

TEST(Degree3, ExactMomentsMatchAtOrderThree) {
    for (int d = 1; d <= 3; ++d) {
        const auto f = degree3_formula(d);
        EXPECT_EQ(f.atoms().size(), static_cast<std::size_t>(2 * d));
        MomentCheckOptions opt;
        opt.m = 3;
        const auto r = check_moments(f, opt);
        EXPECT_TRUE(r.passed()) << "d=" << d;
        EXPECT_LE(r.max_abs_diff(), 1e-13);
        ASSERT_NE(r.find({0}), nullptr);
        EXPECT_NEAR(r.find({0})->cubature, 1.0, 1e-15);
    }
}

TEST(Degree3, FailsAtOrderFour) {
    const auto f = degree3_formula(2);
    MomentCheckOptions opt;
    opt.m = 4;
    const auto r = check_moments(f, opt);
    EXPECT_FALSE(r.passed());
    // E[S^{1111}] = d^2 / (2d) / 24 = 1/12 for d = 2 against 1/8
    const auto* row = r.find({1, 1, 1, 1});
    ASSERT_NE(row, nullptr);
    EXPECT_NEAR(row->cubature, 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(row->target, 0.125, 1e-15);
    EXPECT_FALSE(row->pass);
}

TEST(Degree3, SpatialAlphabetOnRequest) {
    MomentCheckOptions opt;
    opt.m = 3;
    opt.time_letter = false;
    const auto r = check_moments(degree3_formula(2), opt);
    EXPECT_TRUE(r.passed());
    EXPECT_FALSE(r.alphabet.has_time_letter);
}

TEST(WongZakai, ExactModeUnsupported) {
    MomentCheckOptions opt;
    EXPECT_THROW(check_moments(wong_zakai_formula(2), opt), UnsupportedMode);
}

TEST(WongZakai, MonteCarloMatchesOrderThree) {
    MomentCheckOptions opt;
    opt.m = 3;
    opt.mode = MomentMode::monte_carlo;
    opt.samples = 40'000;
    opt.seed = 17;
    const auto r = check_moments(wong_zakai_formula(2), opt);
    EXPECT_TRUE(r.passed());
}

TEST(NinomiyaVictoir, PathStructure) {
    Rng rng(1);
    const auto f = ninomiya_victoir_formula(3);
    for (int i = 0; i < 20; ++i) {
        const auto p = f.draw(rng);
        ASSERT_TRUE(p.has_time_component());
        EXPECT_EQ(p.num_segments(), 5u);
        EXPECT_DOUBLE_EQ(p.time_values().back(), 1.0);
        EXPECT_NEAR(p.time_lipschitz(), 4.0, 1e-12);
        // coordinates move one at a time and h is flat while they do
        for (std::size_t s = 1; s + 1 < p.num_segments(); ++s) {
            EXPECT_EQ(p.time_value(s + 1), p.time_value(s));
            int moved = 0;
            for (int c = 0; c < 3; ++c) moved += p.node(s + 1)[c] != p.node(s)[c];
            EXPECT_LE(moved, 1);
        }
    }
}

TEST(NinomiyaVictoir, MonteCarloMatchesOrderFiveWithTimeLetter) {
    MomentCheckOptions opt;
    opt.m = 5;
    opt.mode = MomentMode::monte_carlo;
    opt.samples = 50'000;
    opt.seed = 23;
    const auto r = check_moments(ninomiya_victoir_formula(2), opt);
    EXPECT_TRUE(r.passed());
    EXPECT_TRUE(r.alphabet.has_time_letter);
    ASSERT_NE(r.find({0, 1, 1}), nullptr);
    ASSERT_EQ(r.find({0, 0, 1, 1}), nullptr);  // degree 6 is outside the check
}

TEST(DrawIndex, FollowsWeights) {
    const double a[] = {1.0};
    const double b[] = {-1.0};
    const auto f = CubatureFormula::discrete("skew", 1, 1, {0.2, 0.8},
                                             {PiecewiseLinearPath::line(a), PiecewiseLinearPath::line(b)},
                                             TimeComponent::none);
    Rng rng(99);
    int first = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) first += f.draw_index(rng) == 0;
    EXPECT_NEAR(first / static_cast<double>(n), 0.2, 4 * std::sqrt(0.16 / n));
}

TEST(Words, Formatting) {
    const int w[] = {0, 1, 2};
    EXPECT_EQ(word_to_string(w), "012");
    EXPECT_EQ(word_to_string({}), "empty");
}
