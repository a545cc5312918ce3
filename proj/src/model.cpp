#include "gnormal/model.hpp"

#include "gnormal/error.hpp"
#include "parse_util.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gnormal {

GFunction::GFunction(double sigma_lo, double sigma_hi) : lo_(sigma_lo), hi_(sigma_hi) {
    if (!std::isfinite(lo_) || !std::isfinite(hi_))
        fail(ErrorKind::domain, "generator bounds must be finite");
    if (lo_ < 0.0 || lo_ > hi_ || hi_ <= 0.0)
        fail(ErrorKind::domain, "generator bounds must satisfy 0 <= sigma_lo <= sigma_hi, sigma_hi > 0; got (" +
                                    std::to_string(lo_) + ", " + std::to_string(hi_) + ")");
}

GFunction GFunction::from_beta_sigma(double beta, double sigma) {
    if (!(beta >= 1.0) || !(sigma > 0.0))
        fail(ErrorKind::domain, "from_beta_sigma requires beta >= 1 and sigma > 0");
    const double lo = 2.0 * sigma / (1.0 + beta);
    return GFunction(lo, beta * lo);
}

double g_eval(const GFunction& g, double a) noexcept { return g(a); }

double beta_of(const GFunction& g) {
    if (!g.non_degenerate())
        fail(ErrorKind::domain, "beta is undefined for a degenerate generator (sigma_lo = 0)");
    return g.sigma_hi() / g.sigma_lo();
}

double sigma_of(const GFunction& g) noexcept { return 0.5 * (g.sigma_lo() + g.sigma_hi()); }

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)), total_(0.0) {
    if (segments_.empty())
        fail(ErrorKind::domain, "schedule must contain at least one segment");
    for (const auto& seg : segments_) {
        if (!(seg.duration > 0.0) || !std::isfinite(seg.duration))
            fail(ErrorKind::domain, "segment durations must be finite and strictly positive");
        total_ += seg.duration;
    }
}

const GFunction& Schedule::generator_at(double t) const {
    if (!(t >= 0.0) || t > total_)
        fail(ErrorKind::range, "time " + std::to_string(t) + " outside schedule [0, " +
                                   std::to_string(total_) + "]");
    double end = 0.0;
    for (const auto& seg : segments_) {
        end += seg.duration;
        if (t <= end)
            return seg.generator;
    }
    // t == total_ up to summation rounding
    return segments_.back().generator;
}

double Schedule::max_sigma_hi() const noexcept {
    double m = 0.0;
    for (const auto& seg : segments_)
        m = std::max(m, seg.generator.sigma_hi());
    return m;
}

const GFunction& generator_at(const Schedule& s, double t) { return s.generator_at(t); }

GFunction parse_gfunction(std::string_view text) {
    const auto parts = detail::split(text, text.find(':') != std::string_view::npos ? ':' : ',');
    if (parts.size() != 2)
        fail(ErrorKind::usage, "expected generator as 'sigma_lo,sigma_hi', got '" + std::string(text) + "'");
    return GFunction(detail::parse_double(parts[0]), detail::parse_double(parts[1]));
}

Schedule parse_schedule(std::string_view text) {
    std::vector<Segment> segs;
    for (auto item : detail::split(text, ',')) {
        const auto parts = detail::split(item, ':');
        if (parts.size() != 3)
            fail(ErrorKind::usage, "expected schedule segment 'sigma_lo:sigma_hi:duration', got '" +
                                       std::string(item) + "'");
        segs.push_back({GFunction(detail::parse_double(parts[0]), detail::parse_double(parts[1])),
                        detail::parse_double(parts[2])});
    }
    return Schedule(std::move(segs));
}

}  // namespace gnormal
