#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "cubature/config.hpp"
#include "cubature/error.hpp"

using namespace cubature;

TEST(Config, BlackScholesDefaults) {
    const auto m = model_from_json(Json::parse(R"({"model": "black_scholes", "sigma": [0.2, 0.3]})"));
    EXPECT_EQ(m.system.state_dimension(), 2);
    EXPECT_EQ(m.resolved["N"], 2);
    EXPECT_EQ(m.resolved["drift"], Json::parse("[0.0, 0.0]"));
    EXPECT_FALSE(m.x0.has_value());
    EXPECT_THROW(model_from_json(Json::parse(R"({"model": "black_scholes", "N": 3, "sigma": [0.2]})")),
                 ContractViolation);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(model_from_json(Json::parse(R"({"model": "black_scholes", "sigma": [0.2], "rate": 0.1})")),
                 ContractViolation);
    EXPECT_THROW(model_from_json(Json::parse(R"({"model": "linear", "N": 1, "A0": [[0]], "A1": [[1]], "A3": [[1]]})")),
                 ContractViolation);
    EXPECT_THROW(payoff_from_json(Json::parse(R"({"kind": "call", "strike": 1, "level": 2})")), ContractViolation);
    EXPECT_THROW(mesh_family_from_json(Json::parse(R"({"kind": "uniform", "gamma": 2, "n": [2]})")),
                 ContractViolation);
    EXPECT_THROW(model_from_json(Json::parse(R"({"model": "heston"})")), ContractViolation);
}

TEST(Config, ItoConventionShiftsDrift) {
    // dX = s X dB (Ito) has Stratonovich drift -s^2/2 X.
    const auto m = model_from_json(
        Json::parse(R"({"model": "linear", "N": 1, "A0": [[0]], "A1": [[0.5]], "convention": "ito"})"));
    const double x[] = {2.0};
    double out[1];
    m.system.eval(0, x, out);
    EXPECT_DOUBLE_EQ(out[0], -0.125 * 2.0);
    EXPECT_EQ(m.resolved["A0"], Json::parse("[[0.0]]"));
}

TEST(Config, PayoffsAndMeshes) {
    const auto b = payoff_from_json(Json::parse(R"({"kind": "barrier", "strike": 100, "level": 120})"));
    EXPECT_EQ(b.payoff.kind, PayoffKind::barrier);
    EXPECT_EQ(b.resolved["direction"], "up");
    EXPECT_THROW(payoff_from_json(Json::parse(R"({"kind": "asian", "strike": 1, "observation_times": [1.5]})")),
                 ContractViolation);
    const auto f = mesh_family_from_json(Json::parse(R"({"kind": "kusuoka", "gamma": 2, "n": [2, 4]})"));
    EXPECT_EQ(f.family.mesh(4).node(1), 1.0 / 16.0);
    EXPECT_THROW(mesh_family_from_json(Json::parse(R"({"kind": "kusuoka", "gamma": 0.5, "n": [2]})")),
                 ContractViolation);
}

TEST(Config, References) {
    EXPECT_EQ(reference_from_json(Json(1.5)).value, 1.5);
    const auto r = reference_from_json(Json::parse(R"({"value": 2, "stderr": 0.1})"));
    EXPECT_EQ(r.stderr_, 0.1);
    EXPECT_THROW(reference_from_json(Json::parse(R"({"value": 2, "stderr": -1})")), ContractViolation);
}

TEST(Config, SeedResolution) {
    ::unsetenv("CUBATURE_SEED");
    EXPECT_EQ(resolve_seed(std::nullopt), 0u);
    ::setenv("CUBATURE_SEED", "77", 1);
    EXPECT_EQ(resolve_seed(std::nullopt), 77u);
    EXPECT_EQ(resolve_seed(5), 5u);
    ::setenv("CUBATURE_SEED", "7x", 1);
    EXPECT_THROW(resolve_seed(std::nullopt), ContractViolation);
    ::unsetenv("CUBATURE_SEED");
}

TEST(Config, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 7.965567455405804, 1e-300, -2.5}) {
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(format_double(-INFINITY), "-inf");
}
