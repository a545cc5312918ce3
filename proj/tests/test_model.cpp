#include <gtest/gtest.h>

#include "gnormal/error.hpp"
#include "gnormal/model.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace gnormal {
namespace {

TEST(GFunctionTest, EvaluatesClosedForm) {
    const GFunction g(1.0, 2.0);
    EXPECT_DOUBLE_EQ(g_eval(g, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(g_eval(g, -1.0), -0.5);
    EXPECT_EQ(g_eval(g, 0.0), 0.0);
    EXPECT_EQ(g_eval(GFunction(0.3, 7.0), 0.0), 0.0);
}

TEST(GFunctionTest, RejectsInvalidBounds) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(GFunction(2.0, 1.0), Error);
    EXPECT_THROW(GFunction(-1.0, 1.0), Error);
    EXPECT_THROW(GFunction(0.0, 0.0), Error);
    EXPECT_THROW(GFunction(nan, 1.0), Error);
    EXPECT_THROW(GFunction(1.0, inf), Error);
    EXPECT_NO_THROW(GFunction(0.0, 1.0));
}

TEST(GFunctionTest, BetaAndSigma) {
    EXPECT_DOUBLE_EQ(beta_of(GFunction(1.0, 2.0)), 2.0);
    EXPECT_DOUBLE_EQ(beta_of(GFunction(0.7, 0.7)), 1.0);
    EXPECT_DOUBLE_EQ(beta_of(GFunction(2.0, 3.0)), 1.5);
    EXPECT_DOUBLE_EQ(sigma_of(GFunction(1.0, 2.0)), 1.5);
    EXPECT_DOUBLE_EQ(sigma_of(GFunction(0.7, 0.7)), 0.7);
    EXPECT_DOUBLE_EQ(sigma_of(GFunction(1.0, 3.0)), 2.0);
}

TEST(GFunctionTest, DegenerateHasNoBeta) {
    const GFunction g(0.0, 1.0);
    EXPECT_FALSE(g.non_degenerate());
    try {
        beta_of(g);
        FAIL() << "expected a domain error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(GFunctionTest, SublinearGeneratorProperties) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> sig(0.0, 3.0);
    std::uniform_real_distribution<double> arg(-10.0, 10.0);
    std::uniform_real_distribution<double> lam(0.0, 5.0);
    for (int k = 0; k < 500; ++k) {
        double lo = sig(rng);
        double hi = sig(rng);
        if (lo > hi)
            std::swap(lo, hi);
        if (hi == 0.0)
            continue;
        const GFunction g(lo, hi);
        const double a = arg(rng);
        const double b = arg(rng);
        const double l = lam(rng);
        EXPECT_NEAR(g_eval(g, l * a), l * g_eval(g, a), 1e-12 * (1.0 + std::abs(l * a) * hi * hi));
        EXPECT_LE(g_eval(g, std::min(a, b)), g_eval(g, std::max(a, b)));
        EXPECT_LE(g_eval(g, a + b), g_eval(g, a) + g_eval(g, b) + 1e-12 * (std::abs(a) + std::abs(b)) * hi * hi);
    }
}

TEST(GFunctionTest, ReconstructsFromBetaAndSigma) {
    for (auto [lo, hi] : {std::pair{1.0, 2.0}, std::pair{0.5, 0.5}, std::pair{2.0, 5.0}, std::pair{0.3, 4.1}}) {
        const GFunction g(lo, hi);
        const double beta = beta_of(g);
        const double sigma = sigma_of(g);
        EXPECT_NEAR(lo * (1.0 + beta) / 2.0, sigma, 1e-15 * sigma);
        EXPECT_DOUBLE_EQ(beta * lo, hi);
        const auto back = GFunction::from_beta_sigma(beta, sigma);
        EXPECT_NEAR(back.sigma_lo(), lo, 1e-14);
        EXPECT_NEAR(back.sigma_hi(), hi, 1e-14);
    }
    EXPECT_THROW(GFunction::from_beta_sigma(0.5, 1.0), Error);
}

TEST(ScheduleTest, GeneratorLookupUsesHalfOpenSegments) {
    const Schedule s({{GFunction(1.0, 2.0), 0.5}, {GFunction(1.0, 3.0), 0.5}});
    EXPECT_DOUBLE_EQ(s.total_duration(), 1.0);
    EXPECT_EQ(generator_at(s, 0.25), GFunction(1.0, 2.0));
    EXPECT_EQ(generator_at(s, 0.5), GFunction(1.0, 2.0));
    EXPECT_EQ(generator_at(s, 0.75), GFunction(1.0, 3.0));
    EXPECT_EQ(generator_at(s, 0.0), GFunction(1.0, 2.0));
    EXPECT_EQ(generator_at(s, 1.0), GFunction(1.0, 3.0));
    EXPECT_DOUBLE_EQ(s.max_sigma_hi(), 3.0);
}

TEST(ScheduleTest, RangeErrorsOutsideHorizon) {
    const Schedule s({{GFunction(1.0, 2.0), 1.0}});
    for (double t : {-0.1, 1.0 + 1e-9}) {
        try {
            generator_at(s, t);
            FAIL() << "expected a range error at t=" << t;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::range);
        }
    }
}

TEST(ScheduleTest, RejectsBadSegments) {
    EXPECT_THROW(Schedule({}), Error);
    EXPECT_THROW(Schedule({{GFunction(1.0, 2.0), 0.0}}), Error);
    EXPECT_THROW(Schedule({{GFunction(1.0, 2.0), -1.0}}), Error);
}

TEST(ParseTest, GeneratorsAndSchedules) {
    EXPECT_EQ(parse_gfunction("1,2"), GFunction(1.0, 2.0));
    EXPECT_EQ(parse_gfunction("0.5:1.5"), GFunction(0.5, 1.5));
    EXPECT_THROW(parse_gfunction("1"), Error);
    EXPECT_THROW(parse_gfunction("a,b"), Error);

    const auto s = parse_schedule("1:2:0.5, 1:3:0.25");
    ASSERT_EQ(s.segments().size(), 2u);
    EXPECT_EQ(s.segments()[1].generator, GFunction(1.0, 3.0));
    EXPECT_DOUBLE_EQ(s.total_duration(), 0.75);
    EXPECT_THROW(parse_schedule("1:2"), Error);
}

}  // namespace
}  // namespace gnormal
