#include "gnormal/theorems.hpp"

#include "gnormal/charfun.hpp"
#include "gnormal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace gnormal {

const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::confirmed:
        return "confirmed";
    case Verdict::violated:
        return "violated";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

int exit_code(Verdict v) noexcept {
    switch (v) {
    case Verdict::confirmed:
        return 0;
    case Verdict::violated:
        return 1;
    case Verdict::inconclusive:
        return 2;
    }
    return 2;
}

void write_report_csv(const TheoremReport& report, std::ostream& out) {
    out << "t,x,quantity,measured,reference,error_estimate,bound\n";
    for (const auto& r : report.sweep) {
        out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},", r.t, r.x, r.quantity, r.measured,
                           r.reference, r.error_estimate);
        if (r.bound)
            out << fmt::format("{:.17g}", *r.bound);
        out << '\n';
    }
}

std::string verdict_line(const TheoremReport& report) {
    return fmt::format("{}: {} margin={:.12g} {}", report.name, to_string(report.verdict), report.margin,
                       report.summary);
}

namespace {

void require_non_degenerate(const GFunction& g) {
    if (!g.non_degenerate())
        fail(ErrorKind::domain, "theorem checks need a non-degenerate generator (sigma_lo > 0)");
}

void require_times(std::span<const double> ts) {
    for (double t : ts)
        if (!(t > 0.0) || !std::isfinite(t))
            fail(ErrorKind::domain, "sweep times must be finite and > 0");
}

bool same_beta(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(a, b)); }

TestFunctionSpec phi_spec(double beta) { return TestFunctionSpec(PhiParams{beta, 1.0, 1.0, 0.0}); }

// Equality-type decision: confirmed only when every deviation is within
// tolerance; violated when it is off by more than tolerance plus its error bar.
struct EqualityTally {
    double tolerance;
    double worst_slack = std::numeric_limits<double>::infinity();
    bool any_violated = false;

    void add(double deviation, double error) {
        worst_slack = std::min(worst_slack, tolerance - deviation);
        if (deviation > tolerance + error)
            any_violated = true;
    }

    Verdict verdict() const {
        if (worst_slack > 0.0)
            return Verdict::confirmed;
        return any_violated ? Verdict::violated : Verdict::inconclusive;
    }
};

// Separation-type decision: the discrepancy must exceed `floor` net of the
// error bar at some t; inconclusive when the error bar alone is that large.
struct SeparationTally {
    double floor;
    double best_slack = -std::numeric_limits<double>::infinity();
    double error_at_best = 0.0;

    void add(double discrepancy, double error) {
        const double slack = discrepancy - error - floor;
        if (slack > best_slack) {
            best_slack = slack;
            error_at_best = error;
        }
    }

    Verdict verdict() const {
        if (best_slack > 0.0)
            return Verdict::confirmed;
        return error_at_best >= floor ? Verdict::inconclusive : Verdict::violated;
    }
};

}  // namespace

TheoremReport check_eigen_decay(const GFunction& g, std::span<const double> t_list, std::span<const double> probes,
                                const TheoremConfig& cfg) {
    require_non_degenerate(g);
    require_times(t_list);
    const double beta = beta_of(g);
    const double sigma = sigma_of(g);

    TheoremReport report;
    report.name = "eigen-check";
    report.tolerances = {{"deviation", cfg.eigen_tolerance}};
    if (t_list.empty() || probes.empty()) {
        report.verdict = Verdict::inconclusive;
        report.summary = "empty sweep";
        return report;
    }

    EqualityTally tally{cfg.eigen_tolerance};
    double worst = 0.0;
    for (double t : t_list) {
        const auto results = expect_scaled_many(g, phi_spec(beta), t, probes, cfg.expect);
        for (std::size_t k = 0; k < probes.size(); ++k) {
            const double exact = std::exp(-0.5 * sigma * sigma * t) * phi_eval(beta, probes[k]);
            const double dev = std::abs(results[k].value - exact);
            worst = std::max(worst, dev);
            tally.add(dev, results[k].error_estimate);
            report.sweep.push_back({t, probes[k], "u", results[k].value, exact, results[k].error_estimate, {}});
        }
    }
    report.verdict = tally.verdict();
    report.margin = tally.worst_slack;
    report.summary = fmt::format("beta={:.12g} sigma={:.12g} max_deviation={:.6g}", beta, sigma, worst);
    return report;
}

TheoremReport check_eigen_decay(const GFunction& g, std::span<const double> t_list, const TheoremConfig& cfg) {
    const double probes[] = {0.0, std::numbers::pi / 3.0, std::numbers::pi};
    return check_eigen_decay(g, t_list, probes, cfg);
}

std::vector<TestFunctionSpec> closure_battery() {
    return {
        TestFunctionSpec(PhiParams{3.0, 1.0, 1.0, 0.0}),
        TestFunctionSpec(CosineFn{1.0, 0.3}),
        TestFunctionSpec(GaussBumpFn{0.5, 1.0}),
        TestFunctionSpec(ClippedAbsFn{1.5}),
    };
}

TheoremReport verify_theorem1(const GFunction& g1, const GFunction& g2, std::span<const double> t_list,
                              const TheoremConfig& cfg) {
    require_non_degenerate(g1);
    require_non_degenerate(g2);
    require_times(t_list);
    const double b1 = beta_of(g1);
    const double b2 = beta_of(g2);
    const GFunction cand = candidate_normal(g1, g2);
    const double bn = beta_of(cand);
    const double sn = sigma_of(cand);
    const bool equal = same_beta(b1, b2);
    const GFunction gs[] = {g1, g2};

    TheoremReport report;
    report.name = "theorem1";
    if (t_list.empty()) {
        report.verdict = Verdict::inconclusive;
        report.summary = "empty sweep";
        return report;
    }

    const double b_big = std::max(b1, b2);
    const double floor = equal ? 0.0 : cfg.separation_fraction * separation_gap(bn, b_big);
    EqualityTally eq{cfg.closure_tolerance};
    SeparationTally sep{floor};
    const bool inner_larger = b2 > b1 && !equal;

    for (double t : t_list) {
        const auto conv = convolve_expect_scaled(gs, phi_spec(bn), t, 0.0, cfg.expect);
        const double pred = 2.0 / (1.0 + bn) * std::exp(-0.5 * sn * sn * t);
        SweepRow row{t, 0.0, "conv", conv.value, pred, conv.error_estimate, {}};
        if (inner_larger) {
            const double s2 = sigma_of(g2);
            row.bound = -2.0 * b2 / (1.0 + b2) * std::exp(-0.5 * s2 * s2 * t) + separation_gap(bn, b2);
        }
        report.sweep.push_back(row);
        if (equal)
            eq.add(std::abs(conv.value - pred), conv.error_estimate);
        else
            sep.add(std::abs(conv.value - pred), conv.error_estimate);
    }

    if (equal) {
        for (const auto& f : closure_battery()) {
            for (double t : t_list) {
                const auto conv = convolve_expect_scaled(gs, f, t, 0.0, cfg.expect);
                const auto direct = expect_scaled(cand, f, t, 0.0, cfg.expect);
                const double err = conv.error_estimate + direct.error_estimate;
                report.sweep.push_back({t, 0.0, "battery:" + f.describe(), conv.value, direct.value, err, {}});
                eq.add(std::abs(conv.value - direct.value), err);
            }
        }
        report.verdict = eq.verdict();
        report.margin = eq.worst_slack;
        report.tolerances = {{"closure", cfg.closure_tolerance}};
        report.summary = fmt::format("branch=equal-beta beta={:.12g} candidate=({:.12g},{:.12g})", b1,
                                     cand.sigma_lo(), cand.sigma_hi());
    } else {
        report.verdict = sep.verdict();
        report.margin = sep.best_slack;
        report.tolerances = {{"separation_floor", floor}, {"separation_gap", separation_gap(bn, b_big)}};
        report.summary = fmt::format("branch=unequal-beta beta1={:.12g} beta2={:.12g} beta_N={:.12g} sigma_N={:.12g} "
                                     "gap=e(beta_N,{:.12g})={:.12g}",
                                     b1, b2, bn, sn, b_big, separation_gap(bn, b_big));
    }
    return report;
}

TheoremReport verify_theorem2(const GFunction& g1_in, const GFunction& g2_in, std::span<const double> t_list,
                              const TheoremConfig& cfg) {
    require_non_degenerate(g1_in);
    require_non_degenerate(g2_in);
    require_times(t_list);
    const bool swap = beta_of(g1_in) > beta_of(g2_in);
    const GFunction& g1 = swap ? g2_in : g1_in;
    const GFunction& g2 = swap ? g1_in : g2_in;
    const double b1 = beta_of(g1);
    const double b2 = beta_of(g2);
    const double s1 = sigma_of(g1);
    const double s2 = sigma_of(g2);
    const bool equal = same_beta(b1, b2);
    const GFunction forward_gs[] = {g1, g2};
    const GFunction reverse_gs[] = {g2, g1};

    TheoremReport report;
    report.name = "theorem2";
    if (t_list.empty()) {
        report.verdict = Verdict::inconclusive;
        report.summary = "empty sweep";
        return report;
    }

    const double gap_e = separation_gap(b1, b2);
    const double floor = cfg.separation_fraction * gap_e;
    EqualityTally eq{cfg.closure_tolerance};
    SeparationTally sep{floor};
    const auto f = phi_spec(b1);

    for (double t : t_list) {
        const auto fwd = convolve_expect_scaled(forward_gs, f, t, 0.0, cfg.expect);
        const auto rev = convolve_expect_scaled(reverse_gs, f, t, 0.0, cfg.expect);
        const double gap = fwd.value - rev.value;
        const double err = fwd.error_estimate + rev.error_estimate;
        const double lower = -2.0 * b2 / (1.0 + b2) * std::exp(-0.5 * s2 * s2 * t) + gap_e;
        const double upper = 2.0 / (1.0 + b1) * std::exp(-0.5 * s1 * s1 * t);
        report.sweep.push_back({t, 0.0, "forward", fwd.value, lower, fwd.error_estimate, lower});
        report.sweep.push_back({t, 0.0, "reverse", rev.value, upper, rev.error_estimate, upper});
        report.sweep.push_back({t, 0.0, "gap", gap, equal ? 0.0 : floor, err, {}});
        if (equal)
            eq.add(std::abs(gap), err);
        else
            sep.add(gap, err);
    }

    if (equal) {
        report.verdict = eq.verdict();
        report.margin = eq.worst_slack;
        report.tolerances = {{"commutation", cfg.closure_tolerance}};
        report.summary = fmt::format("branch=equal-beta beta={:.12g}", b1);
    } else {
        report.verdict = sep.verdict();
        report.margin = sep.best_slack;
        report.tolerances = {{"separation_floor", floor}, {"separation_gap", gap_e}};
        report.summary =
            fmt::format("branch=unequal-beta beta_small={:.12g} beta_big={:.12g} e={:.12g}{}", b1, b2, gap_e,
                        swap ? " (arguments swapped so beta_small comes first)" : "");
    }
    return report;
}

TheoremReport check_separation(double alpha, double beta, int n_grid) {
    if (!(alpha >= 1.0) || !(alpha < beta) || !std::isfinite(beta))
        fail(ErrorKind::domain, "separation check needs 1 <= alpha < beta");
    if (n_grid < 2)
        fail(ErrorKind::domain, "separation check needs at least 2 grid points");
    const double e = separation_gap(alpha, beta);
    constexpr double kScanTol = 1e-9;
    constexpr double kZeroTol = 1e-12;

    double min_diff = std::numeric_limits<double>::infinity();
    double argmin = 0.0;
    for (int k = 0; k < n_grid; ++k) {
        const double x = 2.0 * std::numbers::pi * k / n_grid;
        const double d = phi_eval(alpha, x) - phi_eval(beta, x);
        if (d < min_diff) {
            min_diff = d;
            argmin = x;
        }
    }
    const double at_zero = phi_eval(alpha, 0.0) - phi_eval(beta, 0.0);

    TheoremReport report;
    report.name = "separation";
    report.tolerances = {{"scan", kScanTol}, {"at_zero", kZeroTol}};
    report.sweep.push_back({0.0, argmin, "min_difference", min_diff, e, 0.0, e - kScanTol});
    report.sweep.push_back({0.0, 0.0, "difference_at_zero", at_zero, e, 0.0, {}});
    const bool scan_ok = min_diff >= e - kScanTol;
    const bool zero_ok = std::abs(at_zero - e) <= kZeroTol;
    report.margin = std::min(min_diff - (e - kScanTol), kZeroTol - std::abs(at_zero - e));
    report.verdict = scan_ok && zero_ok ? Verdict::confirmed : Verdict::violated;
    report.summary = fmt::format("alpha={:.12g} beta={:.12g} e={:.12g} min={:.12g} at x={:.12g}", alpha, beta, e,
                                 min_diff, argmin);
    return report;
}

}  // namespace gnormal
