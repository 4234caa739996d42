#include <gtest/gtest.h>

#include <cmath>

#include "cubature/error.hpp"
#include "cubature/sde.hpp"
#include "cubature/stats.hpp"
#include "test_util.hpp"

using namespace cubature;

namespace {

VectorFieldSystem scalar_exponential() {
    std::vector<VectorField> f = {
        [](std::span<const double>, std::span<double> out) { out[0] = 0.0; },
        [](std::span<const double> x, std::span<double> out) { out[0] = x[0]; },
    };
    return VectorFieldSystem(1, 1, std::move(f), "exp");
}

IntegrationOptions fixed(int substeps) {
    IntegrationOptions o;
    o.substeps = substeps;
    o.adaptive = false;
    o.use_exact_flow = false;
    return o;
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a[i * n + k] * b[k * n + j];
    return out;
}

}  // namespace

TEST(Integrate, ScalarExponential) {
    const double v[] = {1.0};
    const auto driver = PiecewiseLinearPath::line(v);
    const double x0[] = {1.0};
    const auto sol = integrate_along_path(scalar_exponential(), driver, x0);
    EXPECT_NEAR(sol.terminal()[0], std::exp(1.0), 1e-10);
    EXPECT_EQ(sol.initial()[0], 1.0);
}

TEST(Integrate, RichardsonOrderFour) {
    const double v[] = {1.0};
    const auto driver = PiecewiseLinearPath::line(v);
    const double x0[] = {1.0};
    std::vector<double> logh;
    std::vector<double> logerr;
    for (int s : {2, 4, 8, 16}) {
        const auto sol = integrate_along_path(scalar_exponential(), driver, x0, fixed(s));
        logh.push_back(std::log(1.0 / s));
        logerr.push_back(std::log(std::abs(sol.terminal()[0] - std::exp(1.0))));
    }
    EXPECT_NEAR(least_squares_slope(logh, logerr), 4.0, 0.3);
}

TEST(Integrate, ZeroFieldsKeepStart) {
    Rng rng(1);
    const auto driver = cubature::testing::random_path(rng, 2, 6, true);
    const double x0[] = {1.5, -2.0, 3.0};
    const auto sol = integrate_along_path(zero_system(3, 2), driver, x0, fixed(4));
    for (std::size_t i = 0; i < sol.size(); ++i) {
        EXPECT_EQ(sol.state(i)[0], 1.5);
        EXPECT_EQ(sol.state(i)[2], 3.0);
    }
}

TEST(Integrate, BlackScholesFlowMatchesRungeKutta) {
    Rng rng(2);
    const auto driver = cubature::testing::random_path(rng, 2, 5, true);
    const auto vf = black_scholes({0.3, 0.5}, {0.05, -0.02});
    const double x0[] = {100.0, 50.0};
    const auto exact = integrate_along_path(vf, driver, x0);
    const auto rk = integrate_along_path(vf, driver, x0, IntegrationOptions{8, true, 256, 1e-12, false});
    EXPECT_NEAR(exact.terminal()[0], rk.terminal()[0], 1e-9);
    EXPECT_NEAR(exact.terminal()[1], rk.terminal()[1], 1e-9);
}

TEST(Integrate, AffineEquivariance) {
    const std::size_t n = 2;
    const std::vector<double> a0 = {0.1, -0.4, 0.3, 0.0};
    const std::vector<double> a1 = {0.0, 1.0, -1.0, 0.2};
    const std::vector<double> a2 = {0.5, 0.0, 0.1, -0.3};
    const std::vector<double> p = {2.0, 1.0, 0.5, 1.5};
    const double det = p[0] * p[3] - p[1] * p[2];
    const std::vector<double> pinv = {p[3] / det, -p[1] / det, -p[2] / det, p[0] / det};
    std::vector<std::vector<double>> conj;
    for (const auto& a : {a0, a1, a2}) conj.push_back(matmul(matmul(p, a, n), pinv, n));

    Rng rng(3);
    const auto driver = cubature::testing::random_path(rng, 2, 6, true);
    const double x0[] = {1.0, -0.5};
    const double y0[] = {p[0] * x0[0] + p[1] * x0[1], p[2] * x0[0] + p[3] * x0[1]};
    const auto x = integrate_along_path(linear_system(2, {a0, a1, a2}), driver, x0, fixed(16));
    const auto y = integrate_along_path(linear_system(2, conj), driver, y0, fixed(16));
    const auto xt = x.terminal();
    EXPECT_NEAR(y.terminal()[0], p[0] * xt[0] + p[1] * xt[1], 1e-10);
    EXPECT_NEAR(y.terminal()[1], p[2] * xt[0] + p[3] * xt[1], 1e-10);
}

TEST(Integrate, ReversedLoopReturnsToStart) {
    const PiecewiseLinearPath square(2, {0.0, 0.25, 0.5, 0.75, 1.0}, {0, 0, 1, 0, 1, 1, 0, 1, 0, 0});
    const PiecewiseLinearPath parts[] = {square, reverse(square)};
    const auto there_and_back = concatenate(parts);
    const auto vf = linear_system(2, {{0.0, 0.0, 0.0, 0.0}, {0.3, 1.0, -0.7, 0.1}, {0.0, -0.5, 0.9, 0.4}});
    const double x0[] = {1.0, 2.0};
    const auto sol = integrate_along_path(vf, there_and_back, x0, fixed(64));
    EXPECT_NEAR(sol.terminal()[0], 1.0, 1e-8);
    EXPECT_NEAR(sol.terminal()[1], 2.0, 1e-8);
}

TEST(Integrate, DivergenceNamesSegment) {
    std::vector<VectorField> f = {
        [](std::span<const double>, std::span<double> out) { out[0] = 0.0; },
        [](std::span<const double> x, std::span<double> out) { out[0] = x[0] * x[0] * x[0]; },
    };
    const VectorFieldSystem vf(1, 1, std::move(f));
    const PiecewiseLinearPath driver(1, {0.0, 0.5, 1.0}, {0.0, 0.0, 100.0});
    const double x0[] = {10.0};
    try {
        integrate_along_path(vf, driver, x0);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.segment(), 1u);
    }
}

TEST(Integrate, SampleIndicesFollowMesh) {
    Rng rng(4);
    const auto mesh = uniform_mesh(4);
    const auto driver = build_cubature_path(ninomiya_victoir_formula(1), mesh, rng);
    const double x0[] = {100.0};
    const auto sol = integrate_along_path(black_scholes({0.2}), driver, x0, {}, &mesh);
    ASSERT_EQ(sol.sample_indices.size(), 5u);
    const auto times = sol.sample_times();
    for (std::size_t k = 0; k <= 4; ++k) EXPECT_EQ(times[k], mesh.node(k));
    const auto mid = sol.state_at(0.5 * (sol.times[1] + sol.times[2]));
    EXPECT_NEAR(mid[0], 0.5 * (sol.state(1)[0] + sol.state(2)[0]), 1e-12);
}

TEST(Models, ItoCorrection) {
    const std::vector<std::vector<double>> a = {{0.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 2.0, 0.0}};
    const auto strat = ito_to_stratonovich_drift(2, a);
    // A1^2 = [[2, 0], [0, 2]]
    EXPECT_DOUBLE_EQ(strat[0], -1.0);
    EXPECT_DOUBLE_EQ(strat[1], 0.0);
    EXPECT_DOUBLE_EQ(strat[3], -1.0);
    EXPECT_THROW(linear_system(2, {{1.0}}), ContractViolation);
    EXPECT_THROW(black_scholes({}), ContractViolation);
}

TEST(Reference, BlackScholesClosedForm) {
    EXPECT_NEAR(black_scholes_exact(100, 100, 0.2, 1), 7.965567455405804, 1e-12);
    EXPECT_DOUBLE_EQ(black_scholes_exact(110, 100, 0.0, 1), 10.0);
    EXPECT_NEAR(black_scholes_exact(110, 100, 1e-9, 1), 10.0, 1e-9);
    double prev = 0.0;
    for (double s = 0.05; s < 1.0; s += 0.05) {
        const double v = black_scholes_exact(100, 95, s, 1);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_THROW(black_scholes_exact(-1, 100, 0.2, 1), ContractViolation);
}

TEST(Reference, LognormalQuadrature) {
    const auto bump = [](double x) {
        const double u = x / 100.0 - 1.0;
        return std::exp(-u * u);
    };
    EXPECT_NEAR(lognormal_expectation(bump, 100, 0.2, 0.0, 1.0), 0.9619450681947872, 1e-13);
    const auto call = [](double x) { return std::max(x - 100.0, 0.0); };
    EXPECT_NEAR(lognormal_expectation(call, 100, 0.2, 0.0, 1.0), black_scholes_exact(100, 100, 0.2, 1), 1e-5);
}

TEST(Reference, WongZakaiCallMean) {
    const auto vf = black_scholes({0.2});
    const double x0[] = {100.0};
    Rng rng(5);
    RunningStats st;
    for (int i = 0; i < 20'000; ++i) st.add(std::max(wong_zakai_reference(vf, x0, 1024, rng)[0] - 100.0, 0.0));
    EXPECT_NEAR(st.mean(), black_scholes_exact(100, 100, 0.2, 1), 4 * st.stderr_of_mean());
}

TEST(Reference, WongZakaiCommutingLinearConverges) {
    // A1 = diag(1, 0.5), A0 = 0: exact flow x0 * exp(diag * B_1). The WZ sample
    // along the same Brownian nodes matches it for every fine_n.
    const auto vf = linear_system(2, {{0, 0, 0, 0}, {1.0, 0, 0, 0.5}});
    const double x0[] = {1.0, 2.0};
    for (std::size_t n : {4u, 64u}) {
        Rng rng(6);
        Rng replay(6);
        const auto sol = wong_zakai_path(vf, x0, n, rng);
        const auto driver = build_cubature_path(wong_zakai_formula(1), uniform_mesh(n), replay);
        const double b1 = driver.end_value()[0];
        EXPECT_NEAR(sol.terminal()[0], std::exp(b1), 1e-9 * std::exp(std::abs(b1)));
        EXPECT_NEAR(sol.terminal()[1], 2.0 * std::exp(0.5 * b1), 1e-9 * std::exp(std::abs(b1)));
    }
}
