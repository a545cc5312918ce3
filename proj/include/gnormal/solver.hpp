#pragma once

#include "gnormal/charfun.hpp"
#include "gnormal/model.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gnormal {

enum class Boundary { periodic, edge_copy };

/// Uniform 1-D mesh with nodes x_i = x_min + i*dx, i = 0..n-1, dx = (x_max-x_min)/n.
/// Periodic grids identify x_max with x_min; edge-copy grids mirror the edge
/// node into the ghost cell, which gives a zero second difference there.
class Grid {
public:
    Grid(double x_min, double x_max, int n, Boundary boundary);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    int size() const noexcept { return n_; }
    Boundary boundary() const noexcept { return boundary_; }
    double dx() const noexcept { return (x_max_ - x_min_) / n_; }
    double node(int i) const noexcept { return x_min_ + i * dx(); }

    /// Same domain with half the cells; its node j coincides with node 2j here.
    Grid coarsened() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double x_min_;
    double x_max_;
    int n_;
    Boundary boundary_;
};

class Field {
public:
    Field(Grid grid, std::vector<double> values);

    static Field sample(const Grid& grid, const std::function<double(double)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](int i) const noexcept { return values_[static_cast<std::size_t>(i)]; }

    /// Cubic (4-point Lagrange) interpolation. Periodic grids wrap x; edge-copy
    /// grids throw ErrorKind::range for x outside [x_min, x_max - dx].
    double interpolate(double x) const;

    /// Every other node, on grid().coarsened().
    Field restricted() const;

    double min() const;
    double max() const;

    /// CSV with header "x,u", one node per line, 17 significant digits.
    void write_csv(std::ostream& out) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

struct SolveConfig {
    double cfl_safety = 0.5;
    bool record_error_estimate = false;

    void validate() const;
};

struct SolveReport {
    Field final;
    long steps_taken = 0;
    std::vector<double> dt_used;  // nominal step per segment
    std::optional<double> error_estimate;
};

/// Largest step that keeps the explicit update monotone: dx^2 / sigma_hi^2.
double max_stable_dt(const Grid& grid, const GFunction& g) noexcept;

/// One explicit step u_i += dt * G((u_{i+1} - 2u_i + u_{i-1}) / dx^2).
/// Throws ErrorKind::cfl when dt exceeds max_stable_dt.
Field step_explicit(const Field& f, const GFunction& g, double dt);

/// Integrates the G-heat equation through every schedule segment in order.
/// Each segment uses dt = cfl_safety * dx^2 / sigma_hi^2 and shortens its last
/// step to land on the segment end. With record_error_estimate the problem is
/// re-solved on the coarsened grid and max |u_n - u_{n/2}| over shared nodes is
/// reported.
SolveReport solve(const Schedule& s, const Field& initial, const SolveConfig& cfg = {});

/// Problem with initial data lambda*phi_beta(c x + theta) mapped to frequency one.
/// The original solution at (T, x) equals the canonical solution (initial
/// lambda*phi_beta(y + theta), schedule durations times c^2) at (c^2 T, c x).
struct CanonicalProblem {
    PhiParams params;
    Schedule schedule;
    double coordinate_scale = 1.0;
    /// c == 0: the initial data is constant and so is the solution.
    std::optional<double> constant_value;

    double canonical_coordinate(double x) const noexcept { return coordinate_scale * x; }
};

CanonicalProblem rescale_to_canonical(const PhiParams& p, const Schedule& s);

/// Multiplies every segment duration by factor > 0.
Schedule scale_schedule(const Schedule& s, double factor);

struct ConvergenceProblem {
    Schedule schedule;
    std::function<double(double)> initial;
    /// Exact solution at the final time; if empty, the finest grid is the reference.
    std::function<double(double)> exact;
    double x_min = 0.0;
    double x_max = 0.0;
    Boundary boundary = Boundary::periodic;
    SolveConfig config;
};

struct ConvergencePoint {
    int n;
    double error;  // max-norm over nodes
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    /// log(e_k / e_{k+1}) / log(n_{k+1} / n_k), i.e. log2 of the error ratio when n
    /// doubles. NaN when an error is zero.
    std::vector<double> orders;
};

/// Errors for each resolution in n_list (ascending). Without an exact solution
/// the finest n is the reference and is excluded from the reported points.
ConvergenceStudy convergence_study(const ConvergenceProblem& problem, std::span<const int> n_list);

}  // namespace gnormal
