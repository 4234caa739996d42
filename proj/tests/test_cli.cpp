#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "cubature/io.hpp"
#include "cubature/paths.hpp"

using namespace cubature;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

/// Runs the CLI with stderr discarded; `env` is prefixed as VAR=value pairs.
Run cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + CUBATURE_CLI_PATH + "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const std::string kData = CUBATURE_TEST_DATA_DIR;

}  // namespace

TEST(Cli, CubecheckExitCodes) {
    EXPECT_EQ(cli("cubecheck --formula builtin:deg3 --d 2 --m 3").code, 0);
    EXPECT_EQ(cli("cubecheck --formula builtin:deg3 --d 2 --m 4").code, 2);
    EXPECT_EQ(cli("cubecheck --formula " + kData + "/nv_gauss_hermite_d1.json --d 1 --m 5").code, 0);
    EXPECT_EQ(cli("cubecheck --formula builtin:nope --d 2").code, 1);
    EXPECT_EQ(cli("cubecheck --formula builtin:deg3 --d 7").code, 1);
    EXPECT_EQ(cli("").code, 1);
}

TEST(Cli, CubecheckCsvLayout) {
    const auto r = cli("cubecheck --formula builtin:deg3 --d 1 --m 3");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# cubature ", 0), 0u);
    EXPECT_NE(r.out.find("\nword,degree,cubature,target,diff,stderr,pass\n"), std::string::npos);
    EXPECT_NE(r.out.find("\n11,2,0.5,0.5,0,0,1\n"), std::string::npos);
}

TEST(Cli, SignatureOfSquareLoop) {
    const auto r = cli("sig --path " + kData + "/square_loop.json --m 2");
    ASSERT_EQ(r.code, 0);
    const auto s = tensor_from_json(Json::parse(r.out));
    EXPECT_EQ(s.coefficient({1, 2}), 1.0);
    EXPECT_EQ(s.coefficient({2, 1}), -1.0);
    EXPECT_EQ(s.coefficient({1}), 0.0);
    // Unknown keys in the path file are refused.
    EXPECT_EQ(cli("sig --path " + kData + "/bs_call.json --m 2").code, 1);
}

TEST(Cli, PriceAndRate) {
    const auto price = cli("cubprice --config " + kData + "/bs_call.json");
    EXPECT_EQ(price.code, 0);
    EXPECT_NE(price.out.find("\nestimate,stderr,samples,divergent,reliable,reference,reference_stderr,abs_error\n"),
              std::string::npos);
    const auto rate = cli("cubrate --config " + kData + "/mean_reverting_rate.json");
    EXPECT_EQ(rate.code, 0);
    EXPECT_NE(rate.out.find("\nfitted_order,"), std::string::npos);
}

TEST(Cli, SeedFromEnvironment) {
    const std::string args = "cubecheck --formula builtin:wz --d 1 --m 2 --mode mc --samples 2000";
    const auto flag = cli(args + " --seed 5");
    const auto env = cli(args, "CUBATURE_SEED=5");
    const auto other = cli(args, "CUBATURE_SEED=6");
    EXPECT_EQ(flag.code, 0);
    EXPECT_EQ(flag.out, env.out);
    EXPECT_NE(flag.out, other.out);
}
