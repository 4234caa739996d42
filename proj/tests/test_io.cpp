#include <gtest/gtest.h>

#include "cubature/error.hpp"
#include "cubature/io.hpp"
#include "test_util.hpp"

using namespace cubature;
using cubature::testing::max_abs_diff;
using cubature::testing::random_path;

TEST(Json, TensorRoundTrip) {
    Rng rng(3);
    for (bool with_time : {false, true}) {
        const auto s = signature(random_path(rng, 2, 4, with_time), 4).series();
        const auto back = tensor_from_json(Json::parse(tensor_to_json(s).dump()));
        EXPECT_EQ(back.alphabet(), s.alphabet());
        EXPECT_EQ(max_abs_diff(back, s), 0.0);
    }
}

TEST(Json, TensorRejectsSlotsAboveCap) {
    TensorSeries s(Alphabet{1, true}, 3);
    auto j = tensor_to_json(s);
    // word (0, 0) has graded degree 4 > 3
    j["levels"][2][0] = 1.0;
    EXPECT_THROW(tensor_from_json(j), ContractViolation);
    j["levels"][2][0] = 0.0;
    j["extra"] = 1;
    EXPECT_THROW(tensor_from_json(j), ContractViolation);
}

TEST(Json, PathResamplesTimeComponent) {
    const auto j = Json::parse(R"({"d": 1, "breakpoints": [0, 1], "nodes": [[0], [2]],
                                   "h_breakpoints": [0, 0.5, 1], "h_nodes": [0, 0.25, 1]})");
    const auto p = path_from_json(j);
    ASSERT_EQ(p.num_nodes(), 3u);
    EXPECT_EQ(p.node(1)[0], 1.0);
    EXPECT_EQ(p.time_value(1), 0.25);
    const auto again = path_from_json(Json::parse(path_to_json(p).dump()));
    EXPECT_EQ(again.num_nodes(), 3u);
    EXPECT_EQ(again.time_value(2), 1.0);
}

TEST(Json, FormulaRoundTrip) {
    const auto f = degree3_formula(2);
    const auto g = formula_from_json(Json::parse(formula_to_json(f).dump()));
    EXPECT_EQ(g.order(), 3);
    EXPECT_EQ(g.time_component(), TimeComponent::identity);
    MomentCheckOptions opt;
    EXPECT_EQ(check_moments(g, opt).max_abs_diff(), check_moments(f, opt).max_abs_diff());
    EXPECT_THROW(formula_to_json(wong_zakai_formula(1)), UnsupportedMode);
}

TEST(Json, FormulaSpecs) {
    EXPECT_EQ(formula_from_spec("builtin:nv", 2).order(), 5);
    EXPECT_THROW(formula_from_spec("builtin:euler", 2), ContractViolation);
    EXPECT_THROW(formula_from_spec("/nonexistent/formula.json", 2), ContractViolation);
    EXPECT_THROW(formula_from_spec(std::string(CUBATURE_TEST_DATA_DIR) + "/nv_gauss_hermite_d1.json", 2),
                 ContractViolation);
}
