#include <gtest/gtest.h>

#include <cmath>

#include "cubature/error.hpp"
#include "cubature/meshes_walks.hpp"
#include "test_util.hpp"

using namespace cubature;
using cubature::testing::max_abs_diff;

TEST(Mesh, Uniform) {
    const auto m = uniform_mesh(4);
    ASSERT_EQ(m.intervals(), 4u);
    EXPECT_EQ(m.node(1), 0.25);
    EXPECT_EQ(m.node(3), 0.75);
    EXPECT_EQ(m.mesh_size(), 0.25);
    EXPECT_EQ(uniform_mesh(1).nodes().size(), 2u);
    EXPECT_THROW(uniform_mesh(0), ContractViolation);
}

TEST(Mesh, Kusuoka) {
    const auto m = kusuoka_mesh(4, 2.0);
    EXPECT_DOUBLE_EQ(m.node(1), 1.0 / 16);
    EXPECT_DOUBLE_EQ(m.node(2), 0.25);
    EXPECT_DOUBLE_EQ(m.node(3), 9.0 / 16);
    EXPECT_DOUBLE_EQ(m.mesh_size(), 7.0 / 16);
    EXPECT_THROW(kusuoka_mesh(4, 0.5), ContractViolation);
    const auto u = kusuoka_mesh(8, 1.0);
    for (std::size_t k = 0; k <= 8; ++k) EXPECT_DOUBLE_EQ(u.node(k), uniform_mesh(8).node(k));
    double prev = 2.0;
    for (std::size_t n = 4; n <= 4096; n *= 2) {
        const double size = kusuoka_mesh(n, 3.0).mesh_size();
        EXPECT_NEAR(size, 1.0 - std::pow((n - 1.0) / n, 3.0), 1e-14);
        EXPECT_LT(size, prev);
        prev = size;
    }
}

TEST(Mesh, Parse) {
    EXPECT_EQ(parse_mesh("uniform:8").intervals(), 8u);
    EXPECT_DOUBLE_EQ(parse_mesh("kusuoka:4:2").node(1), 1.0 / 16);
    EXPECT_THROW(parse_mesh("uniform:0"), ContractViolation);
    EXPECT_THROW(parse_mesh("uniform:x"), ContractViolation);
    EXPECT_THROW(parse_mesh("kusuoka:4"), ContractViolation);
    EXPECT_THROW(parse_mesh("geometric:4"), ContractViolation);
    EXPECT_THROW(parse_mesh("kusuoka:4:0.5"), ContractViolation);
}

TEST(BuildPath, WongZakaiInterpolatesNodes) {
    const auto mesh = kusuoka_mesh(6, 2.0);
    Rng rng(1);
    const auto p = build_cubature_path(wong_zakai_formula(2), mesh, rng);
    EXPECT_EQ(p.num_nodes(), 7u);
    for (std::size_t k = 0; k <= 6; ++k) {
        EXPECT_EQ(p.breakpoints()[k], mesh.node(k));
        EXPECT_EQ(p.time_value(k), mesh.node(k));
    }
}

TEST(BuildPath, IdentityTimeIsExact) {
    const auto mesh = kusuoka_mesh(5, 3.0);
    Rng rng(2);
    const auto p = build_cubature_path(degree3_formula(3), mesh, rng);
    for (std::size_t i = 0; i < p.num_nodes(); ++i) EXPECT_EQ(p.time_value(i), p.breakpoints()[i]);
}

TEST(BuildPath, NinomiyaVictoirTimeDeviationBound) {
    Rng rng(3);
    const auto f = ninomiya_victoir_formula(2);
    const double lipschitz = 3.0;
    for (const auto& mesh : {uniform_mesh(7), kusuoka_mesh(9, 2.0)}) {
        const auto p = build_cubature_path(f, mesh, rng);
        for (std::size_t k = 0; k <= mesh.intervals(); ++k) {
            const auto idx = p.breakpoint_index(mesh.node(k));
            ASSERT_TRUE(idx.has_value());
            EXPECT_EQ(p.time_value(*idx), mesh.node(k));
        }
        double dev = 0.0;
        for (std::size_t i = 0; i < p.num_nodes(); ++i) dev = std::max(dev, std::abs(p.time_value(i) - p.breakpoints()[i]));
        EXPECT_LE(dev, (1 + lipschitz) * mesh.mesh_size());
    }
}

TEST(BuildPath, SeedDeterminism) {
    Rng a(77);
    Rng b(77);
    const auto mesh = uniform_mesh(10);
    const auto p = build_cubature_path(ninomiya_victoir_formula(2), mesh, a);
    const auto q = build_cubature_path(ninomiya_victoir_formula(2), mesh, b);
    EXPECT_TRUE(std::equal(p.nodes().begin(), p.nodes().end(), q.nodes().begin(), q.nodes().end()));
    EXPECT_TRUE(std::equal(p.time_values().begin(), p.time_values().end(), q.time_values().begin(),
                           q.time_values().end()));
}

TEST(Walk, ChenConsistency) {
    Rng rng(4);
    const auto mesh = kusuoka_mesh(12, 2.0);
    const auto f = ninomiya_victoir_formula(2);
    const auto path = build_cubature_path(f, mesh, rng);
    const auto walk = walk_nodes(path, mesh, 3, true);
    ASSERT_EQ(walk.node_elements.size(), 13u);
    EXPECT_LE(max_abs_diff(walk.node_elements[0].series(), TensorSeries::unit(f.alphabet(), 3)), 0.0);
    EXPECT_LE(max_abs_diff(walk.node_elements.back().series(), signature(path, 3).series()), 1e-11);
    for (std::size_t k : {3u, 7u, 12u}) {
        EXPECT_LE(max_abs_diff(walk.node_elements[k].series(), signature(path, 3, 0.0, mesh.node(k)).series()), 1e-11);
    }
}

TEST(Walk, BlockIncrementIsDilatedDraw) {
    // Rebuild the same draws to compare each block against delta_sqrt(dt) of its atom.
    const auto mesh = kusuoka_mesh(5, 2.0);
    const auto f = degree3_formula(2);
    Rng rng(5);
    Rng replay(5);
    const auto path = build_cubature_path(f, mesh, rng);
    const auto walk = walk_nodes(path, mesh, 3, true);
    for (std::size_t k = 1; k <= 5; ++k) {
        const auto atom = f.draw(replay);
        const auto block = inverse(walk.node_elements[k - 1]) * walk.node_elements[k];
        EXPECT_LE(max_abs_diff(block.series(), dilate(signature(atom, 3), std::sqrt(mesh.dt(k))).series()), 1e-12);
    }
}

TEST(Holder, TrivialCases) {
    const auto mesh = uniform_mesh(8);
    const auto flat = PiecewiseLinearPath(2, {mesh.nodes().begin(), mesh.nodes().end()}, std::vector<double>(18, 0.0));
    EXPECT_EQ(holder_statistic(walk_nodes(flat, mesh, 2), 0.4), 0.0);

    const double v[] = {3.0, 4.0};
    const auto line = PiecewiseLinearPath::line(v);
    EXPECT_NEAR(holder_statistic(walk_nodes(line, uniform_mesh(1), 2), 0.5), 5.0, 1e-14);
    EXPECT_THROW(holder_statistic(walk_nodes(line, uniform_mesh(1), 2), 1.0), ContractViolation);
}

TEST(Holder, SampleIsSortedAndDeterministic) {
    const auto a = holder_statistic_sample(wong_zakai_formula(2), uniform_mesh(16), 0.4, 300, 9, 1);
    const auto b = holder_statistic_sample(wong_zakai_formula(2), uniform_mesh(16), 0.4, 300, 9, 3);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(Scaling, Degree3UniformFamilyBounded) {
    const std::vector<Mesh> meshes = {uniform_mesh(8), uniform_mesh(16)};
    const auto r = moment_scaling_check(degree3_formula(2), meshes, 1, 10'000, 3);
    EXPECT_EQ(r.rows.size(), 24u);
    EXPECT_TRUE(r.bounded) << "slope " << r.pooled_slope;
    EXPECT_THROW(moment_scaling_check(degree3_formula(2), meshes, 1, 100, 3), ContractViolation);
}

TEST(Scaling, SingleIntervalMesh) {
    const std::vector<Mesh> meshes = {uniform_mesh(1)};
    const auto r = moment_scaling_check(wong_zakai_formula(2), meshes, 1, 10'000, 3);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_TRUE(std::isfinite(r.rows[0].ratio));
}

TEST(Donsker, WongZakaiMarginals) {
    const auto r = donsker_marginal_check(wong_zakai_formula(2), uniform_mesh(16), 100'000, 5);
    EXPECT_TRUE(r.ks_passed());
    ASSERT_TRUE(r.area_applicable);
    // The WZ walk's area variance is (1 - 1/n) / 4, so at n = 16 the check fails.
    EXPECT_NEAR(r.area_variance, 0.25 * (1 - 1.0 / 16), 5 * r.area_variance_stderr);
    EXPECT_TRUE(r.area_mean_pass);
}

TEST(Donsker, CoarseDegree3FailsKs) {
    const auto r = donsker_marginal_check(degree3_formula(1), uniform_mesh(4), 100'000, 6);
    EXPECT_FALSE(r.area_applicable);
    EXPECT_TRUE(r.area_passed());
    EXPECT_FALSE(r.ks_passed());
}

TEST(Conditions, Degree3Exact) {
    const std::vector<Mesh> meshes = {uniform_mesh(4), kusuoka_mesh(16, 2.0), uniform_mesh(256)};
    const auto r = clt_condition_report(degree3_formula(2), meshes, {});
    EXPECT_NEAR(r.second_moment, 2.0, 1e-14);
    for (const auto& row : r.rows) {
        EXPECT_NEAR(row.second_moment_sum, r.second_moment, 1e-12);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                EXPECT_NEAR(row.b[i * 2 + j], i == j ? 1.0 : 0.0, 1e-13);
                EXPECT_EQ(row.a[i * 2 + j], 0.0);
            }
        }
    }
    // sqrt(dt) * sqrt(2) > 0.5 only for dt > 1/8
    EXPECT_GT(r.rows[0].truncated_half, 0.0);
    EXPECT_EQ(r.rows[2].truncated_half, 0.0);
}

TEST(Conditions, WongZakaiMonteCarloDecreasing) {
    const std::vector<Mesh> meshes = {uniform_mesh(16), uniform_mesh(256)};
    ConditionOptions opt;
    opt.mode = MomentMode::monte_carlo;
    opt.samples = 10'000;
    opt.seed = 7;
    const auto r = clt_condition_report(wong_zakai_formula(2), meshes, opt);
    EXPECT_GT(r.rows[0].truncated_half, r.rows[1].truncated_half);
    EXPECT_GT(r.rows[0].truncated_one, r.rows[1].truncated_one);
    EXPECT_NEAR(r.rows[1].b[0], 1.0, 0.05);
    EXPECT_THROW(clt_condition_report(wong_zakai_formula(2), meshes, {}), UnsupportedMode);
}
