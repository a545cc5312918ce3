#include "gnormal/solver.hpp"

#include "gnormal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace gnormal {

Grid::Grid(double x_min, double x_max, int n, Boundary boundary)
    : x_min_(x_min), x_max_(x_max), n_(n), boundary_(boundary) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        fail(ErrorKind::domain, "grid needs finite x_min < x_max");
    if (n < 8)
        fail(ErrorKind::domain, "grid needs at least 8 cells, got " + std::to_string(n));
}

Grid Grid::coarsened() const {
    if (n_ % 2 != 0)
        fail(ErrorKind::domain, "cannot coarsen a grid with an odd cell count");
    return Grid(x_min_, x_max_, n_ / 2, boundary_);
}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(grid_.size()))
        fail(ErrorKind::domain, "field length does not match grid size");
    for (double v : values_)
        if (!std::isfinite(v))
            fail(ErrorKind::domain, "field values must be finite");
}

Field Field::sample(const Grid& grid, const std::function<double(double)>& fn) {
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i)
        v[static_cast<std::size_t>(i)] = fn(grid.node(i));
    return Field(grid, std::move(v));
}

double Field::interpolate(double x) const {
    const int n = grid_.size();
    const double dx = grid_.dx();
    double s = (x - grid_.x_min()) / dx;
    if (grid_.boundary() == Boundary::periodic) {
        s -= n * std::floor(s / n);
    } else if (s < -1e-9 || s > (n - 1) + 1e-9) {
        fail(ErrorKind::range, "interpolation point outside the truncated grid");
    }
    int i = static_cast<int>(std::floor(s));
    double frac = s - i;
    if (frac < 1e-12 && grid_.boundary() == Boundary::periodic)
        return values_[static_cast<std::size_t>(((i % n) + n) % n)];

    // Stencil nodes i-1..i+2; clamp the window inside truncated grids.
    int base = i - 1;
    if (grid_.boundary() == Boundary::edge_copy) {
        base = std::clamp(base, 0, n - 4);
    }
    const double t = s - base;  // position relative to stencil start, in [0, 3]
    auto at = [&](int k) {
        int j = base + k;
        if (grid_.boundary() == Boundary::periodic)
            j = ((j % n) + n) % n;
        return values_[static_cast<std::size_t>(j)];
    };
    double result = 0.0;
    for (int k = 0; k < 4; ++k) {
        double w = 1.0;
        for (int m = 0; m < 4; ++m)
            if (m != k)
                w *= (t - m) / static_cast<double>(k - m);
        result += w * at(k);
    }
    return result;
}

Field Field::restricted() const {
    const Grid coarse = grid_.coarsened();
    std::vector<double> v(static_cast<std::size_t>(coarse.size()));
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = values_[2 * j];
    return Field(coarse, std::move(v));
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

void Field::write_csv(std::ostream& out) const {
    out << "x,u\n";
    for (int i = 0; i < grid_.size(); ++i)
        out << fmt::format("{:.17g},{:.17g}\n", grid_.node(i), values_[static_cast<std::size_t>(i)]);
}

void SolveConfig::validate() const {
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        fail(ErrorKind::domain, "cfl_safety must lie in (0, 1]");
}

double max_stable_dt(const Grid& grid, const GFunction& g) noexcept {
    const double dx = grid.dx();
    return dx * dx / (g.sigma_hi() * g.sigma_hi());
}

namespace {

// One explicit step from `in` into `out`. lo/hi are dt*sigma^2/(2 dx^2) for the
// concave and convex parts of the generator.
void advance(std::span<const double> in, std::span<double> out, double lo, double hi, Boundary boundary) {
    const std::size_t n = in.size();
    const double* u = in.data();
    double* w = out.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d = u[i + 1] - 2.0 * u[i] + u[i - 1];
        w[i] = u[i] + (d >= 0.0 ? hi : lo) * d;
    }
    const double left_ghost = boundary == Boundary::periodic ? u[n - 1] : u[0];
    const double right_ghost = boundary == Boundary::periodic ? u[0] : u[n - 1];
    const double d0 = u[1] - 2.0 * u[0] + left_ghost;
    w[0] = u[0] + (d0 >= 0.0 ? hi : lo) * d0;
    const double dn = right_ghost - 2.0 * u[n - 1] + u[n - 2];
    w[n - 1] = u[n - 1] + (dn >= 0.0 ? hi : lo) * dn;
}

void check_cfl(const Grid& grid, const GFunction& g, double dt) {
    if (!(dt >= 0.0) || dt > max_stable_dt(grid, g) * (1.0 + 1e-12))
        fail(ErrorKind::cfl, fmt::format("time step {:.6g} exceeds the monotonicity bound dx^2/sigma_hi^2 = {:.6g}",
                                         dt, max_stable_dt(grid, g)));
}

struct RawSolve {
    std::vector<double> values;
    long steps = 0;
    std::vector<double> dt_used;
};

RawSolve solve_raw(const Schedule& s, const Grid& grid, std::vector<double> u, double cfl_safety) {
    RawSolve out;
    std::vector<double> next(u.size());
    const double dx2 = grid.dx() * grid.dx();
    for (const auto& seg : s.segments()) {
        const GFunction& g = seg.generator;
        const double dt = cfl_safety * max_stable_dt(grid, g);
        check_cfl(grid, g, dt);
        out.dt_used.push_back(dt);

        const auto full = static_cast<long>(std::floor(seg.duration / dt));
        const double rest = seg.duration - static_cast<double>(full) * dt;
        auto take = [&](double h) {
            const double lo = h * g.sigma_lo() * g.sigma_lo() / (2.0 * dx2);
            const double hi = h * g.sigma_hi() * g.sigma_hi() / (2.0 * dx2);
            advance(u, next, lo, hi, grid.boundary());
            u.swap(next);
            ++out.steps;
        };
        for (long k = 0; k < full; ++k)
            take(dt);
        if (rest > 1e-14 * seg.duration)
            take(rest);

        for (double v : u)
            if (!std::isfinite(v))
                fail(ErrorKind::instability, "non-finite value during time stepping");
    }
    out.values = std::move(u);
    return out;
}

}  // namespace

Field step_explicit(const Field& f, const GFunction& g, double dt) {
    check_cfl(f.grid(), g, dt);
    const double dx2 = f.grid().dx() * f.grid().dx();
    std::vector<double> out(f.values().size());
    advance(f.values(), out, dt * g.sigma_lo() * g.sigma_lo() / (2.0 * dx2),
            dt * g.sigma_hi() * g.sigma_hi() / (2.0 * dx2), f.grid().boundary());
    return Field(f.grid(), std::move(out));
}

SolveReport solve(const Schedule& s, const Field& initial, const SolveConfig& cfg) {
    cfg.validate();
    const auto vals = initial.values();
    RawSolve fine = solve_raw(s, initial.grid(), {vals.begin(), vals.end()}, cfg.cfl_safety);

    SolveReport report{Field(initial.grid(), std::move(fine.values)), fine.steps, std::move(fine.dt_used), {}};
    if (cfg.record_error_estimate) {
        const Field coarse_init = initial.restricted();
        const auto cv = coarse_init.values();
        RawSolve coarse = solve_raw(s, coarse_init.grid(), {cv.begin(), cv.end()}, cfg.cfl_safety);
        double err = 0.0;
        for (std::size_t j = 0; j < coarse.values.size(); ++j)
            err = std::max(err, std::abs(report.final.values()[2 * j] - coarse.values[j]));
        report.error_estimate = err;
    }
    return report;
}

Schedule scale_schedule(const Schedule& s, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        fail(ErrorKind::domain, "schedule scale factor must be finite and > 0");
    std::vector<Segment> segs = s.segments();
    for (auto& seg : segs)
        seg.duration *= factor;
    return Schedule(std::move(segs));
}

CanonicalProblem rescale_to_canonical(const PhiParams& p, const Schedule& s) {
    p.validate();
    if (p.c == 0.0)
        return {p, s, 0.0, p.lambda * phi_eval(p.beta, p.theta)};
    PhiParams canon = p;
    canon.c = 1.0;
    return {canon, scale_schedule(s, p.c * p.c), p.c, std::nullopt};
}

ConvergenceStudy convergence_study(const ConvergenceProblem& problem, std::span<const int> n_list) {
    if (n_list.empty())
        return {};
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        fail(ErrorKind::domain, "convergence_study expects ascending resolutions");

    auto run = [&](int n) {
        const Grid grid(problem.x_min, problem.x_max, n, problem.boundary);
        return solve(problem.schedule, Field::sample(grid, problem.initial), problem.config).final;
    };

    ConvergenceStudy study;
    if (problem.exact) {
        for (int n : n_list) {
            const Field u = run(n);
            double err = 0.0;
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::abs(u[i] - problem.exact(u.grid().node(i))));
            study.points.push_back({n, err});
        }
    } else {
        const int n_ref = n_list.back();
        const Field ref = run(n_ref);
        for (std::size_t k = 0; k + 1 < n_list.size(); ++k) {
            const int n = n_list[k];
            if (n_ref % n != 0)
                fail(ErrorKind::domain, "reference resolution must be a multiple of every coarser one");
            const int stride = n_ref / n;
            const Field u = run(n);
            double err = 0.0;
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::abs(u[i] - ref[i * stride]));
            study.points.push_back({n, err});
        }
    }
    for (std::size_t k = 0; k + 1 < study.points.size(); ++k) {
        const double a = study.points[k].error;
        const double b = study.points[k + 1].error;
        const double ratio = static_cast<double>(study.points[k + 1].n) / study.points[k].n;
        study.orders.push_back(a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(ratio)
                                                  : std::numeric_limits<double>::quiet_NaN());
    }
    return study;
}

}  // namespace gnormal
