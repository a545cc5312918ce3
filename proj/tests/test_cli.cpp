#include <gtest/gtest.h>

#include "gnormal/charfun.hpp"
#include "gnormal/cli.hpp"
#include "gnormal/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace gnormal::cli {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"gnormal-cli"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned)
        argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("gnormal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST(ParseTestFunctionTest, AllForms) {
    EXPECT_NEAR(parse_test_function("cos")(0.0), 1.0, 1e-15);
    EXPECT_NEAR(parse_test_function("cos:freq=2,phase=0.5")(1.0), std::cos(2.5), 1e-15);
    EXPECT_NEAR(parse_test_function("phi:beta=2")(kPi), -4.0 / 3.0, 1e-14);
    EXPECT_NEAR(parse_test_function("phi:beta=2,lambda=3,c=0")(1.0), 2.0, 1e-15);
    EXPECT_NEAR(parse_test_function("gauss:center=1,width=2")(1.0), 1.0, 1e-15);
    EXPECT_NEAR(parse_test_function("clipabs:clip=1.5")(-4.0), 1.5, 1e-15);
    EXPECT_NEAR(parse_test_function("clipabs:clip=10,scale=-1")(2.0), -2.0, 1e-15);
    EXPECT_NEAR(parse_test_function("clippoly:clip=5,coeffs=1;0;1")(2.0), 5.0, 1e-15);
    EXPECT_NEAR(parse_test_function("clippoly:clip=5,coeffs=1;0;1")(1.0), 2.0, 1e-15);
    EXPECT_EQ(parse_test_function("const:7")(123.0), 7.0);
    EXPECT_TRUE(parse_test_function("const:7").is_constant());
}

TEST(ParseTestFunctionTest, RejectsBadInput) {
    for (const char* bad : {"cos:freq=1,amp=2", "phi:beta=2,beta=3", "sine", "gauss:width=0", "const:", "phi:beta=x",
                            "clipabs:clip=-1", "phi:beta=0.5"}) {
        EXPECT_THROW(parse_test_function(bad), Error) << bad;
    }
}

TEST(ParseListTest, NumbersAndPi) {
    const auto v = parse_list("1, -pi,2.5");
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[1], -kPi);
    EXPECT_THROW(parse_list("1,,2"), Error);
}

TEST(CliPhiTest, BetaTwoColumnRange) {
    const auto r = invoke({"phi", "--beta", "2", "--range=-pi,3pi", "--n", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(r.out);
    ASSERT_GE(rows.size(), 1001u);
    EXPECT_EQ(rows[0].size(), 2u);
    EXPECT_EQ(rows[0][0], "x");
    double mx = -1e9;
    double mn = 1e9;
    for (std::size_t k = 1; k <= 1000; ++k) {
        const double v = std::stod(rows[k][1]);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    EXPECT_LE(mx, 2.0 / 3.0 + 1e-15);
    EXPECT_GE(mn, -4.0 / 3.0 - 1e-15);
    // endpoints -pi and 3pi both hit the minimum
    EXPECT_NEAR(mn, -4.0 / 3.0, 1e-12);
    EXPECT_NEAR(mx, 2.0 / 3.0, 1e-4);
}

TEST(CliPhiTest, BetaOneIsCosine) {
    const auto r = invoke({"phi", "--beta", "1", "--range=-5,7", "--n", "300"});
    ASSERT_EQ(r.code, 0);
    const auto rows = read_csv(r.out);
    for (std::size_t k = 1; k <= 300; ++k)
        EXPECT_NEAR(std::stod(rows[k][1]), std::cos(std::stod(rows[k][0])), 1e-12);
}

TEST(CliPhiTest, SeparationVisibleInColumns) {
    const auto r = invoke({"phi", "--beta", "1.5,3", "--range", "0,2pi", "--n", "20001"});
    ASSERT_EQ(r.code, 0);
    const auto rows = read_csv(r.out);
    ASSERT_EQ(rows[0].size(), 3u);
    for (std::size_t k = 1; k <= 20001; ++k)
        ASSERT_GE(std::stod(rows[k][1]) - std::stod(rows[k][2]), 0.3 - 1e-9) << k;
}

TEST(CliPhiTest, DerivativeColumns) {
    const auto r = invoke({"phi", "--beta", "2", "--n", "10", "--derivatives"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(read_csv(r.out)[0].size(), 4u);
}

TEST(CliCommandTest, TheoremTwoExample) {
    const auto r = invoke({"theorem2", "--g1", "1:1.5", "--g2", "1:3", "--t", "8", "--n", "512"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("theorem2: confirmed"), std::string::npos);
    for (const auto& row : read_csv(r.out))
        if (row.size() > 3 && row[2] == "gap")
            EXPECT_GE(std::stod(row[3]), 0.25);
}

TEST(CliCommandTest, ExpectClassicalCosine) {
    const auto r = invoke({"expect", "--g", "1:1", "--f", "cos", "--n", "1024"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "x", "value", "error_estimate"}));
    EXPECT_NEAR(std::stod(rows[1][2]), 0.606531, 5e-4);
}

TEST(CliCommandTest, ConvolveClassical) {
    const auto r = invoke({"convolve", "--g", "1:1", "--g", "1:1", "--f", "cos", "--n", "1024"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(read_csv(r.out)[1][2]), std::exp(-1.0), 5e-4);
}

TEST(CliCommandTest, SolveConstantStaysConstant) {
    const auto r = invoke({"solve", "--schedule", "1:2:1", "--init", "const:7", "--n", "64"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "u"}));
    int seen = 0;
    for (std::size_t k = 1; k < rows.size() && rows[k].size() == 2; ++k, ++seen)
        EXPECT_EQ(std::stod(rows[k][1]), 7.0);
    EXPECT_GE(seen, 64);
}

TEST(CliCommandTest, VerdictExitCodes) {
    EXPECT_EQ(invoke({"separation", "--alpha", "1.5", "--beta", "3", "--n", "10000"}).code, 0);
    EXPECT_EQ(invoke({"eigen-check", "--g", "1:2", "--t", "1", "--n", "256"}).code, 0);
    // an unreachable tolerance cannot be confirmed
    const int strict = invoke({"eigen-check", "--g", "1:2", "--t", "1", "--n", "64", "--tol", "1e-14"}).code;
    EXPECT_TRUE(strict == 1 || strict == 2) << strict;
}

TEST(CliCommandTest, ConvergenceReportsOrders) {
    const auto r = invoke({"convergence", "--g", "1:2", "--n-list", "64,128,256"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "error", "order"}));
    EXPECT_GE(std::stod(rows[3][2]), 1.0);
}

TEST_F(CliFiles, UsageErrorsLeaveNoFiles) {
    const auto out = path("o.csv");
    for (auto args : std::vector<std::vector<std::string>>{
             {"expect", "--g", "2:1", "--f", "cos", "--out", out},
             {"expect", "--g", "1:2", "--f", "cos:amp=2", "--out", out},
             {"expect", "--g", "1:2", "--f", "cos", "--n", "1001", "--out", out},
             {"solve", "--schedule", "1:2", "--init", "cos", "--out", out},
             {"theorem1", "--g1", "0:2", "--g2", "1:2", "--out", out},
             {"separation", "--alpha", "2", "--beta", "2", "--out", out},
             {"phi", "--beta", "0.5", "--out", out},
             {"frobnicate"},
             {"expect", "--f", "cos", "--out", out},
         }) {
        std::vector<const char*> argv{"gnormal-cli"};
        for (const auto& a : args)
            argv.push_back(a.c_str());
        std::ostringstream o;
        std::ostringstream e;
        EXPECT_EQ(run(static_cast<int>(argv.size()), argv.data(), o, e), kExitUsage) << args[0];
        EXPECT_FALSE(fs::exists(out)) << args[0];
    }
    EXPECT_EQ(invoke({}).code, kExitUsage);
}

TEST_F(CliFiles, UnwritableOutputIsIoError) {
    const auto r = invoke({"separation", "--n", "100", "--out", path("missing/dir/o.csv")});
    EXPECT_EQ(r.code, kExitIo);
}

TEST_F(CliFiles, ConfigFileIsOverriddenByFlags) {
    const auto cfg = path("run.cfg");
    {
        std::ofstream c(cfg);
        c << "# defaults for a separation run\n"
          << "alpha = 1.5\n"
          << "beta = 3\n"
          << "n = 1000\n";
    }
    const auto a = path("a.csv");
    ASSERT_EQ(invoke({"separation", "--config", cfg, "--out", a}).code, 0);
    EXPECT_NE(slurp(a).find(",0.29999999999999"), std::string::npos);

    const auto b = path("b.csv");
    ASSERT_EQ(invoke({"separation", "--config", cfg, "--beta", "2", "--alpha", "1", "--out", b}).code, 0);
    const auto rows = read_csv(slurp(b));
    EXPECT_NEAR(std::stod(rows[1][4]), 1.0 / 3.0, 1e-15);

    const auto bad = path("bad.cfg");
    {
        std::ofstream c(bad);
        c << "no equals sign here\n";
    }
    EXPECT_EQ(invoke({"separation", "--config", bad}).code, kExitUsage);
    EXPECT_EQ(invoke({"separation", "--config", path("nope.cfg")}).code, kExitIo);
}

TEST_F(CliFiles, RerunsAreByteIdentical) {
    const auto a = path("a.csv");
    const auto b = path("b.csv");
    for (const auto& p : {a, b})
        ASSERT_EQ(invoke({"expect", "--g", "1:2", "--f", "gauss:center=0.3,width=1", "--t", "0.5,1", "--x", "0,1",
                          "--n", "256", "--out", p})
                      .code,
                  0);
    EXPECT_FALSE(slurp(a).empty());
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliFiles, OutputFileAndSummary) {
    const auto a = path("sol.csv");
    const auto r = invoke({"solve", "--schedule", "1:2:0.5,1:1:0.5", "--init", "phi:beta=2", "--n", "128",
                           "--error-estimate", "--out", a});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(a));
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
    EXPECT_EQ(read_csv(slurp(a)).size(), 129u);
}

}  // namespace
}  // namespace gnormal::cli
