#pragma once

#include "gnormal/charfun.hpp"
#include "gnormal/model.hpp"
#include "gnormal/solver.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gnormal {

// Test functions. Every variant is bounded and Lipschitz with explicit constants.

struct CosineFn {
    double freq = 1.0;
    double phase = 0.0;
};

struct GaussBumpFn {
    double center = 0.0;
    double width = 1.0;
};

/// min(|x|, clip)
struct ClippedAbsFn {
    double clip = 1.0;
};

/// clamp(sum_k coeffs[k] x^k, -clip, clip)
struct ClippedPolyFn {
    std::vector<double> coeffs;
    double clip = 1.0;
};

struct ConstantFn {
    double value = 0.0;
};

/// Arbitrary bounded Lipschitz function; the caller vouches for the constants.
struct CustomFn {
    std::function<double(double)> fn;
    double bound = 0.0;
    double lipschitz = 0.0;
    std::optional<double> period;
    std::string label = "custom";
};

class TestFunctionSpec {
public:
    using Variant = std::variant<PhiParams, CosineFn, GaussBumpFn, ClippedAbsFn, ClippedPolyFn, ConstantFn, CustomFn>;

    /// Evaluates as scale * base(x) + offset. Throws ErrorKind::domain for invalid parameters.
    explicit TestFunctionSpec(Variant base, double scale = 1.0, double offset = 0.0);

    const Variant& base() const noexcept { return base_; }
    double scale() const noexcept { return scale_; }
    double offset() const noexcept { return offset_; }

    double operator()(double x) const;

    /// sup |f|
    double bound() const;
    double lipschitz() const;
    /// Smallest known period, if the function is periodic and non-constant.
    std::optional<double> period() const;
    bool is_constant() const noexcept;

    /// Returns scale * f + offset as a new spec.
    TestFunctionSpec affine(double scale, double offset) const;

    std::string describe() const;

private:
    Variant base_;
    double scale_;
    double offset_;
};

struct ExpectationResult {
    double value = 0.0;
    double error_estimate = 0.0;  // two-grid |u_n - u_{n/2}| at the evaluation point
    int resolution_used = 0;
};

struct ExpectConfig {
    int n = 2048;  // cells; must be divisible by 4
    double cfl_safety = 0.5;
    bool error_estimate = true;

    void validate() const;
};

/// Half-width of truncated domains around the evaluation point.
double truncation_half_width(double max_sigma_hi, double total_time) noexcept;

/// u^f(T, x) for the time-dependent generator in `s` (T = total duration).
/// Periodic f runs on one period-long periodic grid, rescaled to frequency one;
/// everything else on a truncated edge-copy grid centred on x.
ExpectationResult expect_schedule(const Schedule& s, const TestFunctionSpec& f, double x,
                                  const ExpectConfig& cfg = {});

/// N_G[f] = u^f(1, 0).
ExpectationResult expect(const GFunction& g, const TestFunctionSpec& f, const ExpectConfig& cfg = {});

/// N_G[f(x + sqrt(t) .)] = u^f(t, x).
ExpectationResult expect_scaled(const GFunction& g, const TestFunctionSpec& f, double t, double x,
                                const ExpectConfig& cfg = {});

/// expect_scaled at several points from a single solve; off-node points use
/// cubic interpolation.
std::vector<ExpectationResult> expect_scaled_many(const GFunction& g, const TestFunctionSpec& f, double t,
                                                  std::span<const double> xs, const ExpectConfig& cfg = {});

/// (N_{G1} * N_{G2} * ... * N_{Gk})[f(x + sqrt(t) .)]. Evaluated right to left:
/// the last generator acts first on f, each later stage takes the previous
/// field as initial data. gs = {G1, G2} is N_{G1} * N_{G2}.
ExpectationResult convolve_expect_scaled(std::span<const GFunction> gs, const TestFunctionSpec& f, double t,
                                         double x, const ExpectConfig& cfg = {});

ExpectationResult convolve_expect(std::span<const GFunction> gs, const TestFunctionSpec& f,
                                  const ExpectConfig& cfg = {});

/// The only G-normal law the convolution could be: variances add bound by bound.
GFunction candidate_normal(const GFunction& g1, const GFunction& g2);

/// E[f(sigma Z)], Z ~ N(0,1), by adaptive trapezoid quadrature on |z| <= 10
/// with absolute tolerance 1e-8.
double classical_expect(double sigma, const TestFunctionSpec& f);

}  // namespace gnormal
