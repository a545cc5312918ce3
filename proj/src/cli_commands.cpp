#include "gnormal/cli.hpp"

#include "gnormal/charfun.hpp"
#include "gnormal/error.hpp"
#include "gnormal/theorems.hpp"
#include "parse_util.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace gnormal::cli {

namespace {

using detail::parse_double;
using detail::split;
using detail::trim;

// key=value pairs after the "kind:" prefix.
std::map<std::string, double, std::less<>> parse_keys(std::string_view body, std::string_view kind,
                                                      std::initializer_list<std::string_view> allowed) {
    std::map<std::string, double, std::less<>> out;
    if (trim(body).empty())
        return out;
    for (auto item : split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::usage, fmt::format("expected key=value in '{}' spec, got '{}'", kind, item));
        const auto key = trim(item.substr(0, eq));
        bool known = key == "scale" || key == "offset";
        for (auto a : allowed)
            known = known || key == a;
        if (!known)
            fail(ErrorKind::usage, fmt::format("unknown key '{}' for '{}'", key, kind));
        if (out.contains(key))
            fail(ErrorKind::usage, fmt::format("duplicate key '{}' for '{}'", key, kind));
        if (key != "coeffs")
            out.emplace(std::string(key), parse_double(item.substr(eq + 1)));
    }
    return out;
}

double get(const std::map<std::string, double, std::less<>>& m, std::string_view key, double fallback) {
    const auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

// Builds the CSV in memory, then writes it in one go.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        fail(ErrorKind::io, "cannot open output file '" + path + "'");
    file << content;
    file.close();
    if (!file)
        fail(ErrorKind::io, "failed writing output file '" + path + "'");
}

void require_positive_times(const std::vector<double>& ts) {
    if (ts.empty())
        fail(ErrorKind::usage, "need at least one time");
    for (double t : ts)
        if (!(t > 0.0) || !std::isfinite(t))
            fail(ErrorKind::usage, "times must be finite and > 0");
}

Boundary parse_boundary(std::string_view s) {
    if (s == "periodic")
        return Boundary::periodic;
    if (s == "edge" || s == "edge_copy" || s == "edge-copy")
        return Boundary::edge_copy;
    fail(ErrorKind::usage, "boundary must be 'periodic' or 'edge_copy'");
}

int report_and_exit(const TheoremReport& report, const std::string& path, std::ostream& out) {
    std::ostringstream csv;
    write_report_csv(report, csv);
    emit(path, csv.str(), out);
    out << verdict_line(report) << '\n';
    return exit_code(report.verdict);
}

int expectation_rows(const std::vector<GFunction>& gs, const ExpectOptions& o, bool convolve, std::ostream& out) {
    const auto f = parse_test_function(o.function);
    require_positive_times(o.times);
    if (o.points.empty())
        fail(ErrorKind::usage, "need at least one evaluation point");
    const ExpectConfig cfg{o.n, o.cfl, true};
    cfg.validate();

    std::string csv = "t,x,value,error_estimate\n";
    double last = 0.0;
    double last_err = 0.0;
    for (double t : o.times) {
        for (double x : o.points) {
            const auto r = convolve ? convolve_expect_scaled(gs, f, t, x, cfg) : expect_scaled(gs.front(), f, t, x, cfg);
            csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", t, x, r.value, r.error_estimate);
            last = r.value;
            last_err = r.error_estimate;
        }
    }
    emit(o.out, csv, out);
    const std::size_t rows = o.times.size() * o.points.size();
    if (rows == 1)
        out << fmt::format("{}: value={:.12g} error_estimate={:.3g} n={}\n", convolve ? "convolve" : "expect", last,
                           last_err, o.n);
    else
        out << fmt::format("{}: rows={} n={}\n", convolve ? "convolve" : "expect", rows, o.n);
    return 0;
}

}  // namespace

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    if (trim(text).empty())
        return out;
    for (auto item : split(text, ','))
        out.push_back(parse_double(item));
    return out;
}

TestFunctionSpec parse_test_function(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    const auto kind = trim(text.substr(0, colon));
    const auto body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (kind == "const") {
        if (trim(body).empty())
            fail(ErrorKind::usage, "const needs a value, e.g. const:7");
        return TestFunctionSpec(ConstantFn{parse_double(body)});
    }
    if (kind == "clippoly") {
        // coeffs use ';' separators so they can sit inside the comma list.
        std::vector<double> coeffs;
        std::string rest;
        for (auto item : split(body, ',')) {
            if (item.starts_with("coeffs=")) {
                for (auto c : split(item.substr(7), ';'))
                    coeffs.push_back(parse_double(c));
            } else {
                rest += (rest.empty() ? "" : ",") + std::string(item);
            }
        }
        const auto k = parse_keys(rest, kind, {"clip"});
        return TestFunctionSpec(ClippedPolyFn{coeffs, get(k, "clip", 1.0)}, get(k, "scale", 1.0),
                                get(k, "offset", 0.0));
    }
    if (kind == "phi") {
        const auto k = parse_keys(body, kind, {"beta", "lambda", "c", "theta"});
        return TestFunctionSpec(
            PhiParams{get(k, "beta", 1.0), get(k, "lambda", 1.0), get(k, "c", 1.0), get(k, "theta", 0.0)},
            get(k, "scale", 1.0), get(k, "offset", 0.0));
    }
    if (kind == "cos") {
        const auto k = parse_keys(body, kind, {"freq", "phase"});
        return TestFunctionSpec(CosineFn{get(k, "freq", 1.0), get(k, "phase", 0.0)}, get(k, "scale", 1.0),
                                get(k, "offset", 0.0));
    }
    if (kind == "gauss") {
        const auto k = parse_keys(body, kind, {"center", "width"});
        return TestFunctionSpec(GaussBumpFn{get(k, "center", 0.0), get(k, "width", 1.0)}, get(k, "scale", 1.0),
                                get(k, "offset", 0.0));
    }
    if (kind == "clipabs") {
        const auto k = parse_keys(body, kind, {"clip"});
        return TestFunctionSpec(ClippedAbsFn{get(k, "clip", 1.0)}, get(k, "scale", 1.0), get(k, "offset", 0.0));
    }
    fail(ErrorKind::usage, fmt::format("unknown test function kind '{}'", kind));
}

int cmd_phi(const PhiOptions& o, std::ostream& out) {
    if (o.betas.empty())
        fail(ErrorKind::usage, "need at least one beta");
    for (double b : o.betas)
        if (!(b >= 1.0) || !std::isfinite(b))
            fail(ErrorKind::usage, "every beta must be finite and >= 1");
    if (o.n < 2)
        fail(ErrorKind::usage, "phi needs n >= 2");
    if (!(o.x_max > o.x_min) || !std::isfinite(o.x_min) || !std::isfinite(o.x_max))
        fail(ErrorKind::usage, "phi range needs finite x_min < x_max");

    std::string csv = "x";
    for (double b : o.betas) {
        csv += fmt::format(",phi_{}", b);
        if (o.derivatives)
            csv += fmt::format(",phi_d1_{},phi_d2_{}", b, b);
    }
    csv += '\n';
    for (int i = 0; i < o.n; ++i) {
        const double x = o.x_min + (o.x_max - o.x_min) * i / (o.n - 1);
        csv += fmt::format("{:.17g}", x);
        for (double b : o.betas) {
            csv += fmt::format(",{:.17g}", phi_eval(b, x));
            if (o.derivatives)
                csv += fmt::format(",{:.17g},{:.17g}", phi_d1(b, x), phi_d2(b, x));
        }
        csv += '\n';
    }
    emit(o.out, csv, out);
    out << fmt::format("phi: rows={} betas={}\n", o.n, o.betas.size());
    return 0;
}

int cmd_solve(const SolveOptions& o, std::ostream& out) {
    const Schedule schedule = parse_schedule(o.schedule);
    const auto f = parse_test_function(o.init);
    const Grid grid(o.x_min, o.x_max, o.n, parse_boundary(o.boundary));
    const SolveConfig cfg{o.cfl, o.error_estimate};
    cfg.validate();
    if (o.error_estimate)
        (void)grid.coarsened();

    const auto report = solve(schedule, Field::sample(grid, [&f](double x) { return f(x); }), cfg);
    std::ostringstream csv;
    report.final.write_csv(csv);
    emit(o.out, csv.str(), out);
    out << fmt::format("solve: T={:.12g} n={} steps={} min={:.12g} max={:.12g}", schedule.total_duration(), o.n,
                       report.steps_taken, report.final.min(), report.final.max());
    if (report.error_estimate)
        out << fmt::format(" error_estimate={:.3g}", *report.error_estimate);
    out << '\n';
    return 0;
}

int cmd_expect(const ExpectOptions& o, std::ostream& out) {
    if (o.generators.size() != 1)
        fail(ErrorKind::usage, "expect takes exactly one generator");
    return expectation_rows({parse_gfunction(o.generators.front())}, o, false, out);
}

int cmd_convolve(const ExpectOptions& o, std::ostream& out) {
    if (o.generators.empty())
        fail(ErrorKind::usage, "convolve needs at least one generator");
    std::vector<GFunction> gs;
    for (const auto& g : o.generators)
        gs.push_back(parse_gfunction(g));
    return expectation_rows(gs, o, true, out);
}

namespace {

TheoremConfig theorem_config(int n) {
    TheoremConfig cfg;
    cfg.expect.n = n;
    cfg.expect.validate();
    return cfg;
}

}  // namespace

int cmd_theorem1(const TheoremOptions& o, std::ostream& out) {
    const auto g1 = parse_gfunction(o.g1);
    const auto g2 = parse_gfunction(o.g2);
    require_positive_times(o.times);
    return report_and_exit(verify_theorem1(g1, g2, o.times, theorem_config(o.n)), o.out, out);
}

int cmd_theorem2(const TheoremOptions& o, std::ostream& out) {
    const auto g1 = parse_gfunction(o.g1);
    const auto g2 = parse_gfunction(o.g2);
    require_positive_times(o.times);
    return report_and_exit(verify_theorem2(g1, g2, o.times, theorem_config(o.n)), o.out, out);
}

int cmd_eigen_check(const EigenOptions& o, std::ostream& out) {
    const auto g = parse_gfunction(o.g);
    auto cfg = theorem_config(o.n);
    if (!(o.tolerance > 0.0))
        fail(ErrorKind::usage, "tolerance must be > 0");
    cfg.eigen_tolerance = o.tolerance;
    return report_and_exit(check_eigen_decay(g, o.times, o.probes, cfg), o.out, out);
}

int cmd_separation(const SeparationOptions& o, std::ostream& out) {
    return report_and_exit(check_separation(o.alpha, o.beta, o.n), o.out, out);
}

int cmd_convergence(const ConvergenceOptions& o, std::ostream& out) {
    const auto g = parse_gfunction(o.g);
    const double beta = beta_of(g);
    const double sigma = sigma_of(g);
    if (!(o.t > 0.0))
        fail(ErrorKind::usage, "t must be > 0");
    if (o.resolutions.empty())
        fail(ErrorKind::usage, "need at least one resolution");
    for (int n : o.resolutions)
        (void)Grid(0.0, 1.0, n, Boundary::periodic);

    const double decay = std::exp(-0.5 * sigma * sigma * o.t);
    ConvergenceProblem problem{Schedule({{g, o.t}}),
                               [beta](double x) { return phi_eval(beta, x); },
                               [beta, decay](double x) { return decay * phi_eval(beta, x); },
                               0.0,
                               2.0 * std::numbers::pi,
                               Boundary::periodic,
                               SolveConfig{o.cfl, false}};
    const auto study = convergence_study(problem, o.resolutions);
    std::string csv = "n,error,order\n";
    for (std::size_t k = 0; k < study.points.size(); ++k) {
        csv += fmt::format("{},{:.17g},", study.points[k].n, study.points[k].error);
        if (k > 0)
            csv += fmt::format("{:.17g}", study.orders[k - 1]);
        csv += '\n';
    }
    emit(o.out, csv, out);
    double worst_order = std::numeric_limits<double>::infinity();
    for (double p : study.orders)
        worst_order = std::min(worst_order, p);
    out << fmt::format("convergence: beta={:.12g} levels={} min_order={:.4g}\n", beta, study.points.size(),
                       study.orders.empty() ? std::nan("") : worst_order);
    return 0;
}

namespace {

// Returns argv with "--key value" pairs from a flat key = value config file
// inserted after the subcommand, skipping keys already given as flags.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::string path;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
        } else {
            kept.push_back(args[i]);
        }
    }
    if (path.empty() || kept.size() < 2)
        return kept;

    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot read config file '" + path + "'");
    std::vector<std::string> extra;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::usage, "config line without '=': '" + line + "'");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : kept)
            given = given || a == flag || a.starts_with(flag + "=");
        if (given)
            continue;
        if (value == "true") {
            extra.push_back(flag);
        } else if (value != "false") {
            extra.push_back(flag);
            extra.push_back(value);
        }
    }
    std::vector<std::string> merged{kept[0], kept[1]};
    merged.insert(merged.end(), extra.begin(), extra.end());
    merged.insert(merged.end(), kept.begin() + 2, kept.end());
    return merged;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    PhiOptions phi;
    SolveOptions solve_opts;
    ExpectOptions expect_opts;
    ExpectOptions convolve_opts;
    TheoremOptions th1;
    TheoremOptions th2;
    EigenOptions eigen;
    SeparationOptions sep;
    ConvergenceOptions conv;
    std::string phi_betas, phi_range, solve_domain, times_e, points_e, times_c, points_c, times1, times2, times_eig,
        probes_eig, resolutions;

    CLI::App app{"Numerical laboratory for one-dimensional G-normal distributions"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    app.add_option("--config", "flat key = value file with flag defaults (flags win)");

    auto* c_phi = app.add_subcommand("phi", "sample phi_beta (and optionally its derivatives) to CSV");
    c_phi->add_option("--beta", phi_betas, "comma-separated betas >= 1")->default_str("2");
    c_phi->add_option("--range", phi_range, "x_min,x_max")->default_str("-pi,3pi");
    c_phi->add_option("--n", phi.n, "number of sample points")->capture_default_str();
    c_phi->add_flag("--derivatives", phi.derivatives, "add phi_d1 and phi_d2 columns");
    c_phi->add_option("--out", phi.out, "output CSV path (default stdout)");

    auto* c_solve = app.add_subcommand("solve", "solve the G-heat equation and export the final field");
    c_solve->add_option("--schedule", solve_opts.schedule, "lo:hi:duration,...")->required();
    c_solve->add_option("--init", solve_opts.init, "initial function spec")->required();
    c_solve->add_option("--domain", solve_domain, "x_min,x_max")->default_str("0,2pi");
    c_solve->add_option("--n", solve_opts.n, "cells")->capture_default_str();
    c_solve->add_option("--boundary", solve_opts.boundary, "periodic | edge_copy")->capture_default_str();
    c_solve->add_option("--cfl", solve_opts.cfl, "fraction of the monotonicity bound")->capture_default_str();
    c_solve->add_flag("--error-estimate", solve_opts.error_estimate, "two-grid error estimate");
    c_solve->add_option("--out", solve_opts.out, "output CSV path (default stdout)");

    auto add_expect_flags = [](CLI::App* c, ExpectOptions& o, std::string& ts, std::string& xs) {
        c->add_option("--f", o.function, "test function spec")->required();
        c->add_option("--t", ts, "comma-separated times")->default_str("1");
        c->add_option("--x", xs, "comma-separated evaluation points")->default_str("0");
        c->add_option("--n", o.n, "cells (multiple of 4)")->capture_default_str();
        c->add_option("--cfl", o.cfl, "fraction of the monotonicity bound")->capture_default_str();
        c->add_option("--out", o.out, "output CSV path (default stdout)");
    };
    auto* c_expect = app.add_subcommand("expect", "sublinear expectation N_G[f(x + sqrt(t) .)]");
    c_expect->add_option("--g", expect_opts.generators, "generator lo:hi")->required()->expected(1);
    add_expect_flags(c_expect, expect_opts, times_e, points_e);
    auto* c_conv = app.add_subcommand("convolve", "convolution N_{G1} * ... * N_{Gk}, factors in order");
    c_conv->add_option("--g", convolve_opts.generators, "generator lo:hi, repeat per factor")->required();
    add_expect_flags(c_conv, convolve_opts, times_c, points_c);

    auto add_theorem_flags = [](CLI::App* c, TheoremOptions& o, std::string& ts) {
        c->add_option("--g1", o.g1, "outer generator lo:hi")->required();
        c->add_option("--g2", o.g2, "inner generator lo:hi")->required();
        c->add_option("--t", ts, "comma-separated sweep times")->default_str("0.5,1,2,4,8");
        c->add_option("--n", o.n, "cells (multiple of 4)")->capture_default_str();
        c->add_option("--out", o.out, "report CSV path (default stdout)");
    };
    auto* c_th1 = app.add_subcommand("theorem1", "closure of G-normal laws under convolution");
    add_theorem_flags(c_th1, th1, times1);
    auto* c_th2 = app.add_subcommand("theorem2", "commutativity of the convolution");
    add_theorem_flags(c_th2, th2, times2);

    auto* c_eig = app.add_subcommand("eigen-check", "exponential decay of phi_beta under its own generator");
    c_eig->add_option("--g", eigen.g, "generator lo:hi")->required();
    c_eig->add_option("--t", times_eig, "comma-separated times")->default_str("0.25,1,4");
    c_eig->add_option("--probes", probes_eig, "comma-separated x values")->default_str("0,pi/3,pi");
    c_eig->add_option("--n", eigen.n, "cells (multiple of 4)")->capture_default_str();
    c_eig->add_option("--tol", eigen.tolerance, "max deviation")->capture_default_str();
    c_eig->add_option("--out", eigen.out, "report CSV path (default stdout)");

    auto* c_sep = app.add_subcommand("separation", "grid check of phi_alpha - phi_beta >= e(alpha, beta)");
    c_sep->add_option("--alpha", sep.alpha, "alpha >= 1")->capture_default_str();
    c_sep->add_option("--beta", sep.beta, "beta > alpha")->capture_default_str();
    c_sep->add_option("--n", sep.n, "grid points")->capture_default_str();
    c_sep->add_option("--out", sep.out, "report CSV path (default stdout)");

    auto* c_cvg = app.add_subcommand("convergence", "grid refinement study on the eigenfunction problem");
    c_cvg->add_option("--g", conv.g, "generator lo:hi")->capture_default_str();
    c_cvg->add_option("--t", conv.t, "final time")->capture_default_str();
    c_cvg->add_option("--n-list", resolutions, "comma-separated ascending cell counts")->default_str("256,512,1024");
    c_cvg->add_option("--cfl", conv.cfl, "fraction of the monotonicity bound")->capture_default_str();
    c_cvg->add_option("--out", conv.out, "output CSV path (default stdout)");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = merge_config(args);
        std::vector<const char*> cargs;
        for (const auto& a : args)
            cargs.push_back(a.c_str());
        // CLI11 wants argv without ownership; it does not modify it.
        try {
            app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "usage error: " << e.what() << '\n';
            return kExitUsage;
        }

        auto list_or = [](const std::string& s, std::vector<double> fallback) {
            return s.empty() ? fallback : parse_list(s);
        };
        // "pi/3" style fractions for probe lists.
        auto probe_list = [](const std::string& s) {
            std::vector<double> out;
            for (auto item : split(s, ',')) {
                const auto slash = item.find('/');
                if (slash == std::string_view::npos)
                    out.push_back(parse_double(item));
                else
                    out.push_back(parse_double(item.substr(0, slash)) / parse_double(item.substr(slash + 1)));
            }
            return out;
        };
        auto range_of = [](const std::string& s, double& lo, double& hi) {
            if (s.empty())
                return;
            std::vector<double> v;
            for (auto item : split(s, ',')) {
                // "3pi" and "2pi" shorthands
                const auto coeff = item.ends_with("pi") ? item.substr(0, item.size() - 2) : item;
                if (item.ends_with("pi") && coeff != "" && coeff != "-")
                    v.push_back(parse_double(coeff) * std::numbers::pi);
                else
                    v.push_back(parse_double(item));
            }
            if (v.size() != 2)
                fail(ErrorKind::usage, "range needs exactly two values");
            lo = v[0];
            hi = v[1];
        };

        if (c_phi->parsed()) {
            phi.betas = list_or(phi_betas, phi.betas);
            range_of(phi_range, phi.x_min, phi.x_max);
            return cmd_phi(phi, out);
        }
        if (c_solve->parsed()) {
            range_of(solve_domain, solve_opts.x_min, solve_opts.x_max);
            return cmd_solve(solve_opts, out);
        }
        if (c_expect->parsed()) {
            expect_opts.times = list_or(times_e, expect_opts.times);
            expect_opts.points = list_or(points_e, expect_opts.points);
            return cmd_expect(expect_opts, out);
        }
        if (c_conv->parsed()) {
            convolve_opts.times = list_or(times_c, convolve_opts.times);
            convolve_opts.points = list_or(points_c, convolve_opts.points);
            return cmd_convolve(convolve_opts, out);
        }
        if (c_th1->parsed()) {
            th1.times = list_or(times1, th1.times);
            return cmd_theorem1(th1, out);
        }
        if (c_th2->parsed()) {
            th2.times = list_or(times2, th2.times);
            return cmd_theorem2(th2, out);
        }
        if (c_eig->parsed()) {
            eigen.times = list_or(times_eig, eigen.times);
            if (!probes_eig.empty())
                eigen.probes = probe_list(probes_eig);
            return cmd_eigen_check(eigen, out);
        }
        if (c_sep->parsed())
            return cmd_separation(sep, out);
        if (c_cvg->parsed()) {
            if (!resolutions.empty()) {
                conv.resolutions.clear();
                for (double v : parse_list(resolutions))
                    conv.resolutions.push_back(static_cast<int>(v));
            }
            return cmd_convergence(conv, out);
        }
        err << "usage error: no subcommand\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.kind()) {
        case ErrorKind::io:
            return kExitIo;
        case ErrorKind::instability:
        case ErrorKind::cfl:
            return kExitSoftware;
        default:
            return kExitUsage;
        }
    }
}

}  // namespace gnormal::cli
