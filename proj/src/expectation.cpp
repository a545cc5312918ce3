#include "gnormal/expectation.hpp"

#include "gnormal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gnormal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
    if (!ok)
        fail(ErrorKind::domain, what);
}

// Coefficients with trailing zeros dropped.
std::vector<double> trimmed(const std::vector<double>& c) {
    std::vector<double> out = c;
    while (!out.empty() && out.back() == 0.0)
        out.pop_back();
    return out;
}

double poly(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

// |p'| on the only region where |p| <= clip; outside |x| <= r both p - clip and
// p + clip have no roots (Cauchy bound), so the clamp is flat there.
double clipped_poly_lipschitz(const ClippedPolyFn& p) {
    const auto c = trimmed(p.coeffs);
    if (c.size() <= 1)
        return 0.0;
    const double lead = std::abs(c.back());
    double m = p.clip;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        m = std::max(m, std::abs(c[i]) + (i == 0 ? p.clip : 0.0));
    const double r = 1.0 + m / lead;
    double lip = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i)
        lip += static_cast<double>(i) * std::abs(c[i]) * std::pow(r, static_cast<double>(i - 1));
    return lip;
}

}  // namespace

TestFunctionSpec::TestFunctionSpec(Variant base, double scale, double offset)
    : base_(std::move(base)), scale_(scale), offset_(offset) {
    require(std::isfinite(scale_) && std::isfinite(offset_), "test function scale and offset must be finite");
    std::visit(overloaded{
                   [](const PhiParams& p) { p.validate(); },
                   [](const CosineFn& c) {
                       require(std::isfinite(c.freq) && std::isfinite(c.phase), "cosine parameters must be finite");
                   },
                   [](const GaussBumpFn& g) {
                       require(std::isfinite(g.center) && std::isfinite(g.width) && g.width > 0.0,
                               "gauss bump needs finite center and width > 0");
                   },
                   [](const ClippedAbsFn& a) {
                       require(std::isfinite(a.clip) && a.clip > 0.0, "clip level must be finite and > 0");
                   },
                   [](const ClippedPolyFn& p) {
                       require(std::isfinite(p.clip) && p.clip > 0.0, "clip level must be finite and > 0");
                       for (double c : p.coeffs)
                           require(std::isfinite(c), "polynomial coefficients must be finite");
                   },
                   [](const ConstantFn& c) { require(std::isfinite(c.value), "constant must be finite"); },
                   [](const CustomFn& c) {
                       require(static_cast<bool>(c.fn), "custom test function needs a callable");
                       require(std::isfinite(c.bound) && std::isfinite(c.lipschitz) && c.bound >= 0.0 &&
                                   c.lipschitz >= 0.0,
                               "custom test function needs finite bound and Lipschitz constant");
                       require(!c.period || (*c.period > 0.0 && std::isfinite(*c.period)),
                               "custom period must be finite and > 0");
                   },
               },
               base_);
}

double TestFunctionSpec::operator()(double x) const {
    const double v = std::visit(
        overloaded{
            [x](const PhiParams& p) { return phi_family_eval(p, x); },
            [x](const CosineFn& c) { return std::cos(c.freq * x + c.phase); },
            [x](const GaussBumpFn& g) {
                const double z = (x - g.center) / g.width;
                return std::exp(-0.5 * z * z);
            },
            [x](const ClippedAbsFn& a) { return std::min(std::abs(x), a.clip); },
            [x](const ClippedPolyFn& p) { return std::clamp(poly(p.coeffs, x), -p.clip, p.clip); },
            [](const ConstantFn& c) { return c.value; },
            [x](const CustomFn& c) { return c.fn(x); },
        },
        base_);
    return scale_ * v + offset_;
}

double TestFunctionSpec::bound() const {
    const double b = std::visit(overloaded{
                                    [](const PhiParams& p) { return p.lambda * -phi_min(p.beta); },
                                    [](const CosineFn&) { return 1.0; },
                                    [](const GaussBumpFn&) { return 1.0; },
                                    [](const ClippedAbsFn& a) { return a.clip; },
                                    [](const ClippedPolyFn& p) { return p.clip; },
                                    [](const ConstantFn& c) { return std::abs(c.value); },
                                    [](const CustomFn& c) { return c.bound; },
                                },
                                base_);
    return std::abs(scale_) * b + std::abs(offset_);
}

double TestFunctionSpec::lipschitz() const {
    // |phi_beta'| <= 1 on both branches.
    const double l = std::visit(overloaded{
                                    [](const PhiParams& p) { return p.lambda * std::abs(p.c); },
                                    [](const CosineFn& c) { return std::abs(c.freq); },
                                    [](const GaussBumpFn& g) { return 1.0 / (g.width * std::sqrt(std::numbers::e)); },
                                    [](const ClippedAbsFn&) { return 1.0; },
                                    [](const ClippedPolyFn& p) { return clipped_poly_lipschitz(p); },
                                    [](const ConstantFn&) { return 0.0; },
                                    [](const CustomFn& c) { return c.lipschitz; },
                                },
                                base_);
    return std::abs(scale_) * l;
}

std::optional<double> TestFunctionSpec::period() const {
    if (is_constant())
        return std::nullopt;
    return std::visit(overloaded{
                          [](const PhiParams& p) -> std::optional<double> { return kTwoPi / std::abs(p.c); },
                          [](const CosineFn& c) -> std::optional<double> { return kTwoPi / std::abs(c.freq); },
                          [](const CustomFn& c) -> std::optional<double> { return c.period; },
                          [](const auto&) -> std::optional<double> { return std::nullopt; },
                      },
                      base_);
}

bool TestFunctionSpec::is_constant() const noexcept {
    if (scale_ == 0.0)
        return true;
    return std::visit(overloaded{
                          [](const PhiParams& p) { return p.c == 0.0; },
                          [](const CosineFn& c) { return c.freq == 0.0; },
                          [](const ClippedPolyFn& p) { return trimmed(p.coeffs).size() <= 1; },
                          [](const ConstantFn&) { return true; },
                          [](const auto&) { return false; },
                      },
                      base_);
}

TestFunctionSpec TestFunctionSpec::affine(double scale, double offset) const {
    return TestFunctionSpec(base_, scale * scale_, scale * offset_ + offset);
}

std::string TestFunctionSpec::describe() const {
    std::string base = std::visit(
        overloaded{
            [](const PhiParams& p) {
                return fmt::format("phi:beta={},lambda={},c={},theta={}", p.beta, p.lambda, p.c, p.theta);
            },
            [](const CosineFn& c) { return fmt::format("cos:freq={},phase={}", c.freq, c.phase); },
            [](const GaussBumpFn& g) { return fmt::format("gauss:center={},width={}", g.center, g.width); },
            [](const ClippedAbsFn& a) { return fmt::format("clipabs:clip={}", a.clip); },
            [](const ClippedPolyFn& p) {
                std::string s = "clippoly:clip=" + fmt::format("{}", p.clip) + ",coeffs=";
                for (std::size_t i = 0; i < p.coeffs.size(); ++i)
                    s += (i ? ";" : "") + fmt::format("{}", p.coeffs[i]);
                return s;
            },
            [](const ConstantFn& c) { return fmt::format("const:{}", c.value); },
            [](const CustomFn& c) { return c.label; },
        },
        base_);
    if (scale_ == 1.0 && offset_ == 0.0)
        return base;
    return fmt::format("{}*({})+{}", scale_, base, offset_);
}

void ExpectConfig::validate() const {
    if (n < 16 || n % 4 != 0)
        fail(ErrorKind::domain, "expectation resolution must be a multiple of 4 and at least 16");
    SolveConfig{cfl_safety, false}.validate();
}

double truncation_half_width(double max_sigma_hi, double total_time) noexcept {
    return std::max(8.0 * max_sigma_hi * std::sqrt(total_time), 10.0);
}

namespace {

// A problem laid out on a concrete grid: stages run in time order on
// `initial`, the answer is read at canonical coordinates.
struct Layout {
    Grid grid;
    std::function<double(double)> initial;
    std::vector<Segment> stages;
    std::vector<double> coords;
};

Layout lay_out(std::vector<Segment> stages, const TestFunctionSpec& f, std::span<const double> xs, int n) {
    if (const auto* p = std::get_if<PhiParams>(&f.base())) {
        // Frequency scaling folds into time: u(T, x; h(c.)) = u(c^2 T, c x; h).
        const CanonicalProblem canon = rescale_to_canonical(*p, Schedule(stages));
        std::vector<double> ys;
        for (double x : xs)
            ys.push_back(canon.canonical_coordinate(x));
        const PhiParams cp = canon.params;
        const double scale = f.scale();
        const double offset = f.offset();
        return {Grid(ys.front(), ys.front() + kTwoPi, n, Boundary::periodic),
                [cp, scale, offset](double y) { return scale * phi_family_eval(cp, y) + offset; },
                canon.schedule.segments(), std::move(ys)};
    }
    if (const auto period = f.period()) {
        const double c = kTwoPi / *period;
        std::vector<double> ys;
        for (double x : xs)
            ys.push_back(c * x);
        for (auto& seg : stages)
            seg.duration *= c * c;
        return {Grid(ys.front(), ys.front() + kTwoPi, n, Boundary::periodic), [f, c](double y) { return f(y / c); },
                std::move(stages), std::move(ys)};
    }
    double total = 0.0;
    double sigma_hi = 0.0;
    for (const auto& seg : stages) {
        total += seg.duration;
        sigma_hi = std::max(sigma_hi, seg.generator.sigma_hi());
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const double center = 0.5 * (*lo + *hi);
    const double half = truncation_half_width(sigma_hi, total) + 0.5 * (*hi - *lo);
    return {Grid(center - half, center + half, n, Boundary::edge_copy), [f](double x) { return f(x); },
            std::move(stages), {xs.begin(), xs.end()}};
}

// Runs the stages as a composition of single-segment solves.
Field run_stages(const Grid& grid, const Layout& layout, double cfl_safety) {
    Field u = Field::sample(grid, layout.initial);
    for (const auto& stage : layout.stages)
        u = solve(Schedule({stage}), u, SolveConfig{cfl_safety, false}).final;
    return u;
}

double read(const Field& u, double y) {
    // Node hits are exact; the grid is laid out so the first point is a node.
    const Grid& g = u.grid();
    const double s = (y - g.x_min()) / g.dx();
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9 && r >= 0 && r < g.size())
        return u[static_cast<int>(r)];
    return u.interpolate(y);
}

std::vector<ExpectationResult> evaluate(std::vector<Segment> stages, const TestFunctionSpec& f,
                                        std::span<const double> xs, const ExpectConfig& cfg) {
    cfg.validate();
    if (xs.empty())
        return {};
    std::vector<ExpectationResult> out;
    if (f.is_constant()) {
        for (double x : xs)
            out.push_back({f(x), 0.0, 0});
        return out;
    }
    const Layout layout = lay_out(std::move(stages), f, xs, cfg.n);
    const Field fine = run_stages(layout.grid, layout, cfg.cfl_safety);
    std::optional<Field> coarse;
    if (cfg.error_estimate)
        coarse = run_stages(layout.grid.coarsened(), layout, cfg.cfl_safety);
    for (double y : layout.coords) {
        ExpectationResult r{read(fine, y), 0.0, cfg.n};
        if (coarse)
            r.error_estimate = std::abs(r.value - read(*coarse, y));
        out.push_back(r);
    }
    return out;
}

}  // namespace

ExpectationResult expect_schedule(const Schedule& s, const TestFunctionSpec& f, double x, const ExpectConfig& cfg) {
    const double xs[] = {x};
    return evaluate(s.segments(), f, xs, cfg).front();
}

ExpectationResult expect(const GFunction& g, const TestFunctionSpec& f, const ExpectConfig& cfg) {
    return expect_scaled(g, f, 1.0, 0.0, cfg);
}

ExpectationResult expect_scaled(const GFunction& g, const TestFunctionSpec& f, double t, double x,
                                const ExpectConfig& cfg) {
    const double xs[] = {x};
    return expect_scaled_many(g, f, t, xs, cfg).front();
}

std::vector<ExpectationResult> expect_scaled_many(const GFunction& g, const TestFunctionSpec& f, double t,
                                                  std::span<const double> xs, const ExpectConfig& cfg) {
    if (!(t > 0.0) || !std::isfinite(t))
        fail(ErrorKind::domain, "expect_scaled needs finite t > 0");
    return evaluate({{g, t}}, f, xs, cfg);
}

ExpectationResult convolve_expect_scaled(std::span<const GFunction> gs, const TestFunctionSpec& f, double t,
                                         double x, const ExpectConfig& cfg) {
    if (gs.empty())
        fail(ErrorKind::domain, "convolution needs at least one generator");
    if (!(t > 0.0) || !std::isfinite(t))
        fail(ErrorKind::domain, "convolution scale t must be finite and > 0");
    std::vector<Segment> stages;
    for (auto it = gs.rbegin(); it != gs.rend(); ++it)
        stages.push_back({*it, t});
    const double xs[] = {x};
    return evaluate(std::move(stages), f, xs, cfg).front();
}

ExpectationResult convolve_expect(std::span<const GFunction> gs, const TestFunctionSpec& f, const ExpectConfig& cfg) {
    return convolve_expect_scaled(gs, f, 1.0, 0.0, cfg);
}

GFunction candidate_normal(const GFunction& g1, const GFunction& g2) {
    return GFunction(std::hypot(g1.sigma_lo(), g2.sigma_lo()), std::hypot(g1.sigma_hi(), g2.sigma_hi()));
}

namespace {

struct Quadrature {
    const std::function<double(double)>& integrand;
    double tol_density;  // allowed error per unit length

    double refine(double a, double fa, double b, double fb, double whole, int depth) const {
        const double m = 0.5 * (a + b);
        const double fm = integrand(m);
        const double left = 0.5 * (m - a) * (fa + fm);
        const double right = 0.5 * (b - m) * (fm + fb);
        if (depth >= 40 || std::abs(left + right - whole) <= tol_density * (b - a))
            return left + right;
        return refine(a, fa, m, fm, left, depth + 1) + refine(m, fm, b, fb, right, depth + 1);
    }
};

}  // namespace

double classical_expect(double sigma, const TestFunctionSpec& f) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        fail(ErrorKind::domain, "classical_expect needs finite sigma >= 0");
    if (sigma == 0.0 || f.is_constant())
        return f(0.0);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const std::function<double(double)> integrand = [&](double z) {
        return f(sigma * z) * inv_sqrt_2pi * std::exp(-0.5 * z * z);
    };
    constexpr double kZMax = 10.0;
    constexpr double kTol = 1e-8;
    constexpr int kPanels = 256;
    // Trapezoid error is about a third of the refinement difference.
    const Quadrature q{integrand, kTol / (2.0 * kZMax)};
    double total = 0.0;
    const double h = 2.0 * kZMax / kPanels;
    for (int k = 0; k < kPanels; ++k) {
        const double a = -kZMax + k * h;
        const double b = a + h;
        const double fa = integrand(a);
        const double fb = integrand(b);
        total += q.refine(a, fa, b, fb, 0.5 * h * (fa + fb), 0);
    }
    return total;
}

}  // namespace gnormal
