#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace gnormal {

/**
 * Sublinear generator G(a) = 1/2 (sigma_hi^2 a^+ - sigma_lo^2 a^-).
 *
 * The pair (sigma_lo, sigma_hi) bounds the volatility of a one-dimensional
 * G-normal law. Construction rejects non-finite or misordered bounds and
 * sigma_hi = 0. sigma_lo = 0 is allowed (degenerate generator); such
 * generators can be solved with but have no shape ratio.
 */
class GFunction {
public:
    GFunction(double sigma_lo, double sigma_hi);

    /// Rebuilds the bounds from shape ratio beta = hi/lo and mean volatility (lo+hi)/2.
    static GFunction from_beta_sigma(double beta, double sigma);

    double sigma_lo() const noexcept { return lo_; }
    double sigma_hi() const noexcept { return hi_; }

    bool non_degenerate() const noexcept { return lo_ > 0.0; }

    double operator()(double a) const noexcept {
        return a >= 0.0 ? 0.5 * hi_ * hi_ * a : 0.5 * lo_ * lo_ * a;
    }

    friend bool operator==(const GFunction&, const GFunction&) = default;

private:
    double lo_;
    double hi_;
};

double g_eval(const GFunction& g, double a) noexcept;

/// sigma_hi / sigma_lo. Throws ErrorKind::domain for a degenerate generator.
double beta_of(const GFunction& g);

/// (sigma_lo + sigma_hi) / 2, the decay rate of the characteristic family.
double sigma_of(const GFunction& g) noexcept;

struct Segment {
    GFunction generator;
    double duration;
};

/// Piecewise-constant-in-time generator. Segment k covers the half-open
/// interval (T_{k-1}, T_k]; t = 0 belongs to the first segment.
class Schedule {
public:
    explicit Schedule(std::vector<Segment> segments);

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    double total_duration() const noexcept { return total_; }

    /// Throws ErrorKind::range outside [0, total_duration()].
    const GFunction& generator_at(double t) const;

    /// Largest sigma_hi over all segments.
    double max_sigma_hi() const noexcept;

private:
    std::vector<Segment> segments_;
    double total_;
};

const GFunction& generator_at(const Schedule& s, double t);

/// Parses "lo,hi" or "lo:hi".
GFunction parse_gfunction(std::string_view text);

/// Parses comma-separated "lo:hi:duration" triples in time order.
Schedule parse_schedule(std::string_view text);

}  // namespace gnormal
