#pragma once

#include "gnormal/expectation.hpp"
#include "gnormal/model.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gnormal {

enum class Verdict { confirmed, violated, inconclusive };

const char* to_string(Verdict v) noexcept;

/// Process exit code for a verdict: 0 confirmed, 1 violated, 2 inconclusive.
int exit_code(Verdict v) noexcept;

struct SweepRow {
    double t = 0.0;
    double x = 0.0;
    std::string quantity;
    double measured = 0.0;
    double reference = 0.0;
    double error_estimate = 0.0;
    std::optional<double> bound;  // analytic bound from the inequality chain, if any
};

struct TheoremReport {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    std::vector<SweepRow> sweep;
    /// Worst-case slack of the deciding inequality, net of error estimates.
    double margin = 0.0;
    std::vector<std::pair<std::string, double>> tolerances;
    std::string summary;
};

/// Header "t,x,quantity,measured,reference,error_estimate,bound".
void write_report_csv(const TheoremReport& report, std::ostream& out);

/// "<name>: <verdict> margin=<m> <summary>"
std::string verdict_line(const TheoremReport& report);

inline constexpr double kDefaultSweep[] = {0.5, 1.0, 2.0, 4.0, 8.0};

struct TheoremConfig {
    ExpectConfig expect{1024, 0.5, true};
    double eigen_tolerance = 1e-3;
    double closure_tolerance = 5e-3;
    /// Fraction of the separation gap a non-closure/non-commutativity
    /// discrepancy must exceed after subtracting error estimates.
    double separation_fraction = 0.5;
};

/// Compares u(t, x) for initial phi_{beta_g} with e^{-sigma^2 t/2} phi_beta(x).
TheoremReport check_eigen_decay(const GFunction& g, std::span<const double> t_list,
                                std::span<const double> probes, const TheoremConfig& cfg = {});
TheoremReport check_eigen_decay(const GFunction& g, std::span<const double> t_list, const TheoremConfig& cfg = {});

/// Four extra test functions used to confirm closure when the shape ratios agree.
std::vector<TestFunctionSpec> closure_battery();

/// Whether N_{G1} * N_{G2} behaves as the G-normal law candidate_normal(g1, g2).
/// Equal ratios: conv must match the eigen prediction and the battery must match
/// expect(candidate). Unequal ratios: some t must give
/// |conv - pred| - err >= fraction * e(beta_N, max(beta_1, beta_2)).
TheoremReport verify_theorem1(const GFunction& g1, const GFunction& g2, std::span<const double> t_list,
                              const TheoremConfig& cfg = {});

/// Whether N_{G1} * N_{G2} and N_{G2} * N_{G1} agree on phi_{beta_small}(sqrt(t) .).
TheoremReport verify_theorem2(const GFunction& g1, const GFunction& g2, std::span<const double> t_list,
                              const TheoremConfig& cfg = {});

/// Grid scan of phi_alpha - phi_beta over [0, 2 pi) against e(alpha, beta).
TheoremReport check_separation(double alpha, double beta, int n_grid);

}  // namespace gnormal
